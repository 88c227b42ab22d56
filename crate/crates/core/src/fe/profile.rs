use serde::{Deserialize, Serialize};

use super::BAR;
use crate::mesh::Mesh;
use crate::{Error, Result};

/// Empirical compressibility-versus-depth law.
///
/// `σ'_z = stress_coeff |z|^stress_exp + gradient |z|` (bar, z in m),
/// `c_M = comp_coeff |σ'_z|^comp_exp` (1/bar).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DepthProfile {
    pub comp_coeff: f64,
    pub comp_exp: f64,
    pub stress_coeff: f64,
    pub stress_exp: f64,
    pub gradient: f64,
}

impl Default for DepthProfile {
    fn default() -> Self {
        Self {
            comp_coeff: 0.01241,
            comp_exp: -1.1342,
            stress_coeff: -0.12218,
            stress_exp: 1.0766,
            gradient: 0.1,
        }
    }
}

/// Young's modulus (Pa) at elevation `z < 0` for Poisson ratio `nu`.
pub fn young_profile(z: f64, nu: f64, params: &DepthProfile) -> Result<f64> {
    if !(z < 0.0) {
        return Err(Error::invalid(format!(
            "elevation {z} must be below ground (z < 0)"
        )));
    }
    let d = z.abs();
    let sigma = params.stress_coeff * d.powf(params.stress_exp) + params.gradient * d;
    let cm = params.comp_coeff * sigma.abs().powf(params.comp_exp);
    if !(cm > 0.0) || !cm.is_finite() {
        return Err(Error::invalid(format!(
            "compressibility {cm} at z = {z} is not positive"
        )));
    }
    Ok((1.0 - 2.0 * nu) * (1.0 + nu) / ((1.0 - nu) * cm) * BAR)
}

/// Depth profile evaluated at cell centroids (vertical axis = last axis) plus
/// a per-layer offset `coefficient * mean(E over layer)`.
///
/// Layers are equal logical slabs counted from the top.
pub fn layered_young(
    mesh: &Mesh,
    nu: f64,
    params: &DepthProfile,
    coefficients: &[f64],
) -> Result<Vec<f64>> {
    let vaxis = mesh.dim() - 1;
    let lat = mesh.cell_lattice();
    let base: Vec<f64> = mesh
        .cells()
        .iter()
        .map(|c| young_profile(c.centroid[vaxis], nu, params))
        .collect::<Result<_>>()?;
    if coefficients.is_empty() {
        return Ok(base);
    }
    let nv = lat.dims[vaxis];
    let nl = coefficients.len();
    let layer: Vec<usize> = (0..lat.len())
        .map(|c| ((nv - 1 - lat.ijk(c)[vaxis]) * nl / nv).min(nl - 1))
        .collect();
    let mut sum = vec![0.0; nl];
    let mut cnt = vec![0usize; nl];
    for (c, &l) in layer.iter().enumerate() {
        sum[l] += base[c];
        cnt[l] += 1;
    }
    let out: Vec<f64> = base
        .iter()
        .zip(&layer)
        .map(|(&e, &l)| e + coefficients[l] * sum[l] / cnt[l].max(1) as f64)
        .collect();
    if let Some(c) = out.iter().position(|&e| !(e > 0.0)) {
        return Err(Error::invalid(format!(
            "layer offsets make Young's modulus non-positive in cell {c}"
        )));
    }
    Ok(out)
}
