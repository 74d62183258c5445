//! Deterministic packet-level simulation of a named-data network routed by
//! greedy hyperbolic routing with an adaptive forwarding strategy, plus a
//! link-state baseline and the analysis used to compare the two.

pub mod error;
pub mod forwarder;
pub mod geometry;
pub mod metrics;
pub mod routing;
pub mod sim;
pub mod strategy;
pub mod suite;
pub mod time;
pub mod topology;

use std::fs;
use std::io::Write;
use std::path::Path;

pub use error::{Error, Result};
pub use geometry::{hyperbolic_distance, rank_by_distance, HyperbolicCoordinate};
pub use time::SimTime;
pub use topology::{NodeId, Topology};

/// Writes `bytes` to a sibling temporary file and renames it over `path`, so
/// readers never observe a partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::parse(path, "not a file path"))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{file_name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}
