use super::Sample;
use crate::error::{ensure, Result};

/// Locations in a 24-2 visual-field test.
pub const VF_LOCATIONS: usize = 52;

/// Nearest-neighbour up-scaling: output `i` takes source `⌊i · len / target_len⌋`.
pub fn upscale_nearest(values: &[f64], target_len: usize) -> Result<Vec<f64>> {
    ensure!(!values.is_empty(), "cannot up-scale an empty vector");
    ensure!(
        target_len >= values.len(),
        "target length {} is shorter than the source ({})",
        target_len,
        values.len()
    );
    let n = values.len();
    Ok((0..target_len).map(|i| values[i * n / target_len]).collect())
}

/// Appends the up-scaled 52-location vector after the sample's features.
pub fn concat_modalities(grid: &Sample, secondary: &[f64], target_len: usize) -> Result<Sample> {
    ensure!(
        secondary.len() == VF_LOCATIONS,
        "secondary modality must have {} values, got {}",
        VF_LOCATIONS,
        secondary.len()
    );
    ensure!(
        target_len >= VF_LOCATIONS,
        "target length must be at least {}, got {}",
        VF_LOCATIONS,
        target_len
    );
    let mut out = grid.clone();
    out.features.extend(upscale_nearest(secondary, target_len)?);
    Ok(out)
}
