//! Driving the command layer from a JSON manifest, as the `dbsim` binary does.

use dbsim::cli::{execute, ExperimentManifest, ManifestFields};

fn main() -> dbsim::Result<()> {
    let fields: ManifestFields =
        serde_json::from_str(r#"{ "command": "bounds", "n_min": 2, "n_max": 6, "m": "n^2", "k": "n" }"#)?;
    let command = fields.command.expect("manifest names a command");
    let manifest = ExperimentManifest::resolve(command, ManifestFields::default(), Some(fields), None)?;
    for artifact in execute(&manifest)? {
        print!("{}", artifact.contents);
    }
    Ok(())
}
