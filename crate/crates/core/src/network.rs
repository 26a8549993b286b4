//! The layered generation network and the evolution matrix it induces.
//!
//! A network of width `m` (even) has `k` brick-wall layers of real 2×2
//! rotations `[[t, r], [-r, t]]` with `t = cos θ`, `r = sin θ`. Layer 1 is an
//! *odd* layer covering mode pairs `(1,2), (3,4), …`; even layers cover
//! `(2,3), (4,5), …` and leave modes 1 and `m` untouched.
//!
//! A photon injected just before layer `q` sees `B_q = C_k ⋯ C_q`. Following
//! the generation network with a Haar unitary `U_H` gives the `m × k·m`
//! evolution matrix `[U_H B_1 | … | U_H B_k]`; column `(q−1)·m + j` is the
//! virtual input for injection layer `q`, mode `j` (both 1-based here, the
//! code uses 0-based indices throughout).

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::OccupationVector;
use crate::linalg::{ComplexAmplitudeMatrix, KERNEL_TOL};
use crate::rng::RandomSeed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerParity {
    /// `m/2` splitters starting at the first mode.
    Odd,
    /// `(m−2)/2` splitters starting at the second mode.
    Even,
}

impl LayerParity {
    pub fn of(index: usize) -> Self {
        if index % 2 == 1 {
            LayerParity::Odd
        } else {
            LayerParity::Even
        }
    }

    pub fn splitter_count(self, m: usize) -> usize {
        match self {
            LayerParity::Odd => m / 2,
            LayerParity::Even => m.saturating_sub(2) / 2,
        }
    }

    fn first_mode(self) -> usize {
        match self {
            LayerParity::Odd => 0,
            LayerParity::Even => 1,
        }
    }
}

/// One brick-wall layer; `index` is 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSplitterLayer {
    pub index: usize,
    pub angles: Vec<f64>,
}

impl BeamSplitterLayer {
    pub fn new(index: usize, angles: Vec<f64>) -> Result<Self> {
        if index == 0 {
            return Err(Error::Index("layer indices are 1-based".into()));
        }
        if let Some(bad) = angles.iter().find(|a| !(0.0..=FRAC_PI_2).contains(*a)) {
            return Err(Error::Configuration(format!(
                "beam-splitter angle {bad} outside [0, pi/2]"
            )));
        }
        Ok(Self { index, angles })
    }

    pub fn parity(&self) -> LayerParity {
        LayerParity::of(self.index)
    }

    /// Mode pairs `(a, a+1)` acted on, with their `(t, r)` coefficients.
    pub fn splitters(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        let first = self.parity().first_mode();
        self.angles
            .iter()
            .enumerate()
            .map(move |(s, th)| (first + 2 * s, th.cos(), th.sin()))
    }

    fn check(&self, m: usize) -> Result<()> {
        check_width(m)?;
        let expected = self.parity().splitter_count(m);
        if self.angles.len() != expected {
            return Err(Error::Configuration(format!(
                "layer {} on {m} modes needs {expected} angles, got {}",
                self.index,
                self.angles.len()
            )));
        }
        Ok(())
    }

    /// `X ← C · X` without forming `C`.
    fn apply_left(&self, x: &mut ComplexAmplitudeMatrix) {
        for (a, t, r) in self.splitters() {
            for j in 0..x.cols() {
                let (u, v) = (x[(a, j)], x[(a + 1, j)]);
                x[(a, j)] = t * u + r * v;
                x[(a + 1, j)] = -r * u + t * v;
            }
        }
    }

    /// `X ← X · C` without forming `C`.
    fn apply_right(&self, x: &mut ComplexAmplitudeMatrix) {
        for (a, t, r) in self.splitters() {
            for i in 0..x.rows() {
                let (u, v) = (x[(i, a)], x[(i, a + 1)]);
                x[(i, a)] = t * u - r * v;
                x[(i, a + 1)] = r * u + t * v;
            }
        }
    }
}

fn check_width(m: usize) -> Result<()> {
    if m < 2 || m % 2 == 1 {
        return Err(Error::UnsupportedGeometry(format!(
            "network width must be even and at least 2, got {m}"
        )));
    }
    Ok(())
}

/// Dense `m × m` coupling matrix of one layer.
pub fn coupling_matrix(layer: &BeamSplitterLayer, m: usize) -> Result<ComplexAmplitudeMatrix> {
    layer.check(m)?;
    let mut c = ComplexAmplitudeMatrix::identity(m);
    for (a, t, r) in layer.splitters() {
        c[(a, a)] = Complex64::new(t, 0.0);
        c[(a, a + 1)] = Complex64::new(r, 0.0);
        c[(a + 1, a)] = Complex64::new(-r, 0.0);
        c[(a + 1, a + 1)] = Complex64::new(t, 0.0);
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkDocument", into = "NetworkDocument")]
pub struct GenerationNetwork {
    m: usize,
    k: usize,
    layers: Vec<BeamSplitterLayer>,
    seed: Option<RandomSeed>,
}

/// On-disk form: `{m, k, seed, stream, layers: [[θ…]…]}`.
#[derive(Serialize, Deserialize)]
struct NetworkDocument {
    m: usize,
    k: usize,
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "is_zero")]
    stream: u64,
    layers: Vec<Vec<f64>>,
}

fn is_zero(x: &u64) -> bool {
    *x == 0
}

impl TryFrom<NetworkDocument> for GenerationNetwork {
    type Error = Error;

    fn try_from(doc: NetworkDocument) -> Result<Self> {
        let mut net = GenerationNetwork::new(doc.m, doc.layers)?;
        if net.k != doc.k {
            return Err(Error::Configuration(format!(
                "document declares k = {} but lists {} layers",
                doc.k, net.k
            )));
        }
        net.seed = doc.seed.map(|s| RandomSeed::with_stream(s, doc.stream));
        Ok(net)
    }
}

impl From<GenerationNetwork> for NetworkDocument {
    fn from(net: GenerationNetwork) -> Self {
        NetworkDocument {
            m: net.m,
            k: net.k,
            seed: net.seed.map(|s| s.seed),
            stream: net.seed.map_or(0, |s| s.stream),
            layers: net.layers.into_iter().map(|l| l.angles).collect(),
        }
    }
}

impl GenerationNetwork {
    /// Network from explicit per-layer angle lists (layer 1 first).
    pub fn new(m: usize, angles: Vec<Vec<f64>>) -> Result<Self> {
        check_width(m)?;
        if angles.is_empty() {
            return Err(Error::Configuration("a network needs at least one layer".into()));
        }
        let layers = angles
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                let layer = BeamSplitterLayer::new(i + 1, a)?;
                layer.check(m)?;
                Ok(layer)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            m,
            k: layers.len(),
            layers,
            seed: None,
        })
    }

    /// Every splitter at the same angle; `theta = 0` is the identity network.
    pub fn uniform(m: usize, k: usize, theta: f64) -> Result<Self> {
        check_width(m)?;
        let angles = (1..=k)
            .map(|i| vec![theta; LayerParity::of(i).splitter_count(m)])
            .collect();
        Self::new(m, angles)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn layers(&self) -> &[BeamSplitterLayer] {
        &self.layers
    }

    /// 1-based layer accessor.
    pub fn layer(&self, i: usize) -> Result<&BeamSplitterLayer> {
        i.checked_sub(1)
            .and_then(|i| self.layers.get(i))
            .ok_or_else(|| Error::Index(format!("layer {i} of {}", self.k)))
    }

    pub fn seed(&self) -> Option<RandomSeed> {
        self.seed
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Angles drawn uniformly on `[0, π/2)`, layer by layer, splitter by splitter.
pub fn random_network(m: usize, k: usize, seed: RandomSeed) -> Result<GenerationNetwork> {
    check_width(m)?;
    if k == 0 {
        return Err(Error::Configuration("k must be at least 1".into()));
    }
    let mut rng = seed.rng();
    let angles = (1..=k)
        .map(|i| {
            (0..LayerParity::of(i).splitter_count(m))
                .map(|_| rng.random_range(0.0..FRAC_PI_2))
                .collect()
        })
        .collect();
    let mut net = GenerationNetwork::new(m, angles)?;
    net.seed = Some(seed);
    Ok(net)
}

/// `B_q = C_k · C_{k−1} ⋯ C_q` for 1-based `q`.
pub fn block(net: &GenerationNetwork, q: usize) -> Result<ComplexAmplitudeMatrix> {
    if q == 0 || q > net.k {
        return Err(Error::Index(format!("block {q} of {}", net.k)));
    }
    let mut b = ComplexAmplitudeMatrix::identity(net.m);
    for layer in &net.layers[q - 1..] {
        layer.apply_left(&mut b);
    }
    Ok(b)
}

/// All blocks `B_1, …, B_k`, built through `B_q = B_{q+1} · C_q`.
pub fn blocks(net: &GenerationNetwork) -> Vec<ComplexAmplitudeMatrix> {
    let mut out = Vec::with_capacity(net.k);
    let mut b = ComplexAmplitudeMatrix::identity(net.m);
    for layer in net.layers.iter().rev() {
        layer.apply_right(&mut b);
        out.push(b.clone());
    }
    out.reverse();
    out
}

/// The `m × k·m` matrix `[U_H B_1 | … | U_H B_k]`, stored block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionMatrix {
    m: usize,
    blocks: Vec<ComplexAmplitudeMatrix>,
}

impl EvolutionMatrix {
    /// Wraps precomputed `m × m` unitary blocks.
    pub fn from_blocks(blocks: Vec<ComplexAmplitudeMatrix>) -> Result<Self> {
        let m = blocks
            .first()
            .map(|b| b.rows())
            .ok_or_else(|| Error::Configuration("evolution matrix needs at least one block".into()))?;
        for (q, b) in blocks.iter().enumerate() {
            if b.rows() != m || b.cols() != m {
                return Err(Error::Dimension(format!(
                    "block {} is {}x{}, expected {m}x{m}",
                    q + 1,
                    b.rows(),
                    b.cols()
                )));
            }
            let residual = b.unitarity_residual();
            if residual >= KERNEL_TOL {
                return Err(Error::Configuration(format!(
                    "block {} is not unitary (residual {residual:e})",
                    q + 1
                )));
            }
        }
        Ok(Self { m, blocks })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    /// Number of virtual input columns, `k·m`.
    pub fn inputs(&self) -> usize {
        self.m * self.blocks.len()
    }

    /// 1-based block `U_H B_q`.
    pub fn block(&self, q: usize) -> Result<&ComplexAmplitudeMatrix> {
        q.checked_sub(1)
            .and_then(|i| self.blocks.get(i))
            .ok_or_else(|| Error::Index(format!("block {q} of {}", self.k())))
    }

    pub fn blocks(&self) -> &[ComplexAmplitudeMatrix] {
        &self.blocks
    }

    /// `(injection layer q, mode j)` of a 0-based column, `q` 1-based.
    pub fn column_origin(&self, column: usize) -> (usize, usize) {
        (column / self.m + 1, column % self.m)
    }

    /// 0-based column for injection layer `q` (1-based) and mode `j` (0-based).
    pub fn column_index(&self, q: usize, j: usize) -> usize {
        (q - 1) * self.m + j
    }

    #[inline]
    pub fn entry(&self, row: usize, column: usize) -> Complex64 {
        self.blocks[column / self.m][(row, column % self.m)]
    }

    pub fn to_dense(&self) -> ComplexAmplitudeMatrix {
        ComplexAmplitudeMatrix::hstack(&self.blocks).expect("blocks share a row count")
    }

    /// Columns `cols` of the full matrix as an `m × cols.len()` matrix.
    pub fn columns(&self, cols: &[usize]) -> Result<ComplexAmplitudeMatrix> {
        if let Some(c) = cols.iter().find(|&&c| c >= self.inputs()) {
            return Err(Error::Index(format!("column {c} of {}", self.inputs())));
        }
        let data = (0..self.m)
            .flat_map(|i| cols.iter().map(move |&c| (i, c)))
            .map(|(i, c)| self.entry(i, c))
            .collect();
        ComplexAmplitudeMatrix::new(self.m, cols.len(), data)
    }
}

pub fn evolution_matrix(net: &GenerationNetwork, u_h: &ComplexAmplitudeMatrix) -> Result<EvolutionMatrix> {
    if u_h.rows() != net.m || u_h.cols() != net.m {
        return Err(Error::Dimension(format!(
            "U_H is {}x{} but the network has {} modes",
            u_h.rows(),
            u_h.cols(),
            net.m
        )));
    }
    let residual = u_h.unitarity_residual();
    if residual >= KERNEL_TOL {
        return Err(Error::Configuration(format!(
            "U_H is not unitary (residual {residual:e})"
        )));
    }
    let blocks = blocks(net).iter().map(|b| u_h * b).collect();
    EvolutionMatrix::from_blocks(blocks)
}

/// The `n × n` matrix whose permanent gives the amplitude of `s_in → s_out`.
///
/// One column per occupied input; output row `j` repeated `s_out[j]` times.
pub fn submatrix(
    ev: &EvolutionMatrix,
    s_in: &OccupationVector,
    s_out: &OccupationVector,
) -> Result<ComplexAmplitudeMatrix> {
    if s_in.len() != ev.inputs() {
        return Err(Error::Dimension(format!(
            "input occupation has length {}, expected k*m = {}",
            s_in.len(),
            ev.inputs()
        )));
    }
    if !s_in.is_binary() {
        return Err(Error::Configuration("input occupations must be 0 or 1 per mode".into()));
    }
    if s_out.len() != ev.m {
        return Err(Error::Dimension(format!(
            "output occupation has length {}, expected m = {}",
            s_out.len(),
            ev.m
        )));
    }
    if s_in.total() != s_out.total() {
        return Err(Error::Conservation {
            input: s_in.total(),
            output: s_out.total(),
        });
    }
    let rows = s_out.mode_list();
    let cols = s_in.mode_list();
    let data = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
        .map(|(r, c)| ev.entry(r, c))
        .collect();
    ComplexAmplitudeMatrix::new(rows.len(), cols.len(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_unitary;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    #[test]
    fn zero_angles_give_identity() {
        let layer = BeamSplitterLayer::new(1, vec![0.0; 3]).unwrap();
        let c = coupling_matrix(&layer, 6).unwrap();
        assert_eq!(c, ComplexAmplitudeMatrix::identity(6));
    }

    #[test]
    fn balanced_two_mode_splitter() {
        let layer = BeamSplitterLayer::new(1, vec![FRAC_PI_4]).unwrap();
        let c = coupling_matrix(&layer, 2).unwrap();
        let s = FRAC_1_SQRT_2;
        let expected = ComplexAmplitudeMatrix::from_real(2, 2, &[s, s, -s, s]).unwrap();
        assert!(c.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn even_layer_leaves_edge_modes_alone() {
        let layer = BeamSplitterLayer::new(2, vec![0.7]).unwrap();
        let c = coupling_matrix(&layer, 4).unwrap();
        for edge in [0, 3] {
            for j in 0..4 {
                let expected = if j == edge { 1.0 } else { 0.0 };
                assert_eq!(c[(edge, j)], Complex64::new(expected, 0.0));
            }
        }
        assert!((c[(1, 1)].re - 0.7f64.cos()).abs() < 1e-15);
        assert!((c[(1, 2)].re - 0.7f64.sin()).abs() < 1e-15);
        assert!((c[(2, 1)].re + 0.7f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn geometry_and_count_errors() {
        let layer = BeamSplitterLayer::new(1, vec![0.1]).unwrap();
        assert!(matches!(coupling_matrix(&layer, 3), Err(Error::UnsupportedGeometry(_))));
        assert!(matches!(coupling_matrix(&layer, 4), Err(Error::Configuration(_))));
        assert!(BeamSplitterLayer::new(1, vec![2.0]).is_err());
        assert!(matches!(
            random_network(5, 2, RandomSeed::new(1)),
            Err(Error::UnsupportedGeometry(_))
        ));
    }

    #[test]
    fn random_network_layer_counts_and_range() {
        let net = random_network(4, 3, RandomSeed::new(8)).unwrap();
        let counts: Vec<usize> = net.layers().iter().map(|l| l.angles.len()).collect();
        assert_eq!(counts, vec![2, 1, 2]);
        let big = random_network(16, 8, RandomSeed::new(9)).unwrap();
        assert!(big
            .layers()
            .iter()
            .flat_map(|l| &l.angles)
            .all(|a| (0.0..FRAC_PI_2).contains(a)));
    }

    #[test]
    fn random_network_is_deterministic() {
        let a = random_network(2, 1, RandomSeed::new(42)).unwrap();
        let b = random_network(2, 1, RandomSeed::new(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn last_block_is_last_coupling() {
        let net = random_network(6, 4, RandomSeed::new(3)).unwrap();
        let bk = block(&net, 4).unwrap();
        let ck = coupling_matrix(net.layer(4).unwrap(), 6).unwrap();
        assert!(bk.max_abs_diff(&ck) < 1e-15);
        assert!(matches!(block(&net, 0), Err(Error::Index(_))));
        assert!(matches!(block(&net, 5), Err(Error::Index(_))));
    }

    #[test]
    fn identity_layers_give_identity_blocks() {
        let net = GenerationNetwork::uniform(8, 3, 0.0).unwrap();
        for q in 1..=3 {
            assert_eq!(block(&net, q).unwrap(), ComplexAmplitudeMatrix::identity(8));
        }
    }

    #[test]
    fn blocks_are_unitary_and_nest() {
        for (m, k, seed) in [(2, 1, 1), (4, 3, 2), (16, 8, 3), (10, 5, 4)] {
            let net = random_network(m, k, RandomSeed::new(seed)).unwrap();
            let all = blocks(&net);
            for q in 1..=k {
                let bq = block(&net, q).unwrap();
                assert!(bq.unitarity_residual() < 1e-10);
                assert!(bq.max_abs_diff(&all[q - 1]) < 1e-12);
                if q < k {
                    let cq = coupling_matrix(net.layer(q).unwrap(), m).unwrap();
                    let nested = &all[q] * &cq;
                    assert!(bq.max_abs_diff(&nested) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn single_layer_evolution() {
        let net = random_network(4, 1, RandomSeed::new(12)).unwrap();
        let u = haar_unitary(4, RandomSeed::new(13)).unwrap();
        let ev = evolution_matrix(&net, &u).unwrap();
        let c1 = coupling_matrix(net.layer(1).unwrap(), 4).unwrap();
        assert!(ev.to_dense().max_abs_diff(&(&u * &c1)) < 1e-12);
        assert!(ev.to_dense().unitarity_residual() < 1e-10);
    }

    #[test]
    fn identity_evolution_stacks_identities() {
        let net = GenerationNetwork::uniform(4, 3, 0.0).unwrap();
        let ev = evolution_matrix(&net, &ComplexAmplitudeMatrix::identity(4)).unwrap();
        let i4 = ComplexAmplitudeMatrix::identity(4);
        let expected = ComplexAmplitudeMatrix::hstack(&[i4.clone(), i4.clone(), i4]).unwrap();
        assert_eq!(ev.to_dense(), expected);
        assert_eq!(ev.column_origin(9), (3, 1));
        assert_eq!(ev.column_index(3, 1), 9);
    }

    #[test]
    fn evolution_columns_have_unit_norm() {
        let net = random_network(8, 4, RandomSeed::new(5)).unwrap();
        let u = haar_unitary(8, RandomSeed::new(6)).unwrap();
        let dense = evolution_matrix(&net, &u).unwrap().to_dense();
        for c in 0..dense.cols() {
            assert!((dense.column_norm(c) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn evolution_dimension_mismatch() {
        let net = random_network(4, 2, RandomSeed::new(1)).unwrap();
        let u = haar_unitary(6, RandomSeed::new(1)).unwrap();
        assert!(matches!(evolution_matrix(&net, &u), Err(Error::Dimension(_))));
    }

    #[test]
    fn submatrix_selection_rules() {
        let net = random_network(4, 2, RandomSeed::new(31)).unwrap();
        let u = haar_unitary(4, RandomSeed::new(32)).unwrap();
        let ev = evolution_matrix(&net, &u).unwrap();

        let s_in = OccupationVector::unit(8, 6);
        let s_out = OccupationVector::unit(4, 2);
        let one = submatrix(&ev, &s_in, &s_out).unwrap();
        assert_eq!(one.as_slice(), &[ev.entry(2, 6)]);

        let s_in = OccupationVector::new(vec![1, 0, 0, 0, 0, 1, 0, 0]);
        let s_out = OccupationVector::new(vec![2, 0, 0, 0]);
        let two = submatrix(&ev, &s_in, &s_out).unwrap();
        assert_eq!(two.row(0), two.row(1));
        assert_eq!(two[(0, 1)], ev.entry(0, 5));

        let bad_out = OccupationVector::new(vec![1, 0, 0, 0]);
        assert!(matches!(
            submatrix(&ev, &s_in, &bad_out),
            Err(Error::Conservation { input: 2, output: 1 })
        ));
    }

    #[test]
    fn identity_network_submatrix_is_one() {
        let net = GenerationNetwork::uniform(4, 3, 0.0).unwrap();
        let ev = evolution_matrix(&net, &ComplexAmplitudeMatrix::identity(4)).unwrap();
        let col = ev.column_index(2, 3);
        let s = submatrix(&ev, &OccupationVector::unit(12, col), &OccupationVector::unit(4, 3)).unwrap();
        assert_eq!(s.as_slice(), &[Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn json_document_round_trip() {
        let net = random_network(6, 3, RandomSeed::with_stream(10, 4)).unwrap();
        let json = net.to_json().unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["m"], 6);
        assert_eq!(value["k"], 3);
        assert_eq!(value["seed"], 10);
        assert_eq!(value["layers"].as_array().unwrap().len(), 3);
        assert_eq!(GenerationNetwork::from_json(&json).unwrap(), net);

        let wrong_k = r#"{"m": 2, "k": 2, "seed": null, "layers": [[0.5]]}"#;
        assert!(GenerationNetwork::from_json(wrong_k).is_err());
    }
}
