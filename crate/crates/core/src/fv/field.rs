use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::mesh::Mesh;
use crate::{Error, Result};

/// One millidarcy per centipoise in m² / (Pa s).
pub const MD_PER_CP: f64 = 9.869233e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    /// Values were given in md/cP and converted to SI.
    MdPerCp,
    Si,
}

/// Per-cell symmetric positive definite mobility tensor `Λ = κ/μ`, stored in SI.
#[derive(Clone, Debug)]
pub struct DiffusionField {
    pub tensors: Vec<[[f64; 3]; 3]>,
    pub source_units: Units,
}

impl DiffusionField {
    pub fn from_tensors(tensors: Vec<[[f64; 3]; 3]>, units: Units) -> Self {
        let s = if units == Units::MdPerCp {
            MD_PER_CP
        } else {
            1.0
        };
        let tensors = tensors
            .into_iter()
            .map(|t| t.map(|row| row.map(|v| v * s)))
            .collect();
        Self {
            tensors,
            source_units: units,
        }
    }

    pub fn isotropic(values: &[f64], units: Units) -> Self {
        Self::from_tensors(values.iter().map(|&v| diag([v, v, v])).collect(), units)
    }

    pub fn uniform(n: usize, tensor: [[f64; 3]; 3], units: Units) -> Self {
        Self::from_tensors(vec![tensor; n], units)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    /// Checks symmetry and positive leading minors of the active `dim x dim` block.
    pub fn validate(&self, dim: usize) -> Result<()> {
        for (c, t) in self.tensors.iter().enumerate() {
            let scale = t.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            for i in 0..dim {
                for j in 0..i {
                    if (t[i][j] - t[j][i]).abs() > 1e-12 * scale {
                        return Err(Error::NotSpd { cell: c });
                    }
                }
            }
            let m1 = t[0][0];
            let m2 = t[0][0] * t[1][1] - t[0][1] * t[1][0];
            let ok = if dim == 2 {
                m1 > 0.0 && m2 > 0.0
            } else {
                let m3 = t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1])
                    - t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0])
                    + t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
                m1 > 0.0 && m2 > 0.0 && m3 > 0.0
            };
            if !ok || !scale.is_finite() {
                return Err(Error::NotSpd { cell: c });
            }
        }
        Ok(())
    }
}

pub fn diag(v: [f64; 3]) -> [[f64; 3]; 3] {
    [[v[0], 0.0, 0.0], [0.0, v[1], 0.0], [0.0, 0.0, v[2]]]
}

/// Horizontal layers of equal logical thickness, each log-normal around its
/// geometric mean (md/cP) with standard deviation `sigma_log10` in log10 units.
///
/// Layers are counted from the top of the grid down. Draws come from
/// `ChaCha8Rng::seed_from_u64(seed)` in cell order.
pub fn layered_lognormal(
    mesh: &Mesh,
    means: &[f64],
    sigma_log10: f64,
    seed: u64,
) -> Result<DiffusionField> {
    if means.is_empty() || means.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::invalid("layer means must be positive"));
    }
    let normal =
        Normal::new(0.0, sigma_log10).map_err(|e| Error::invalid(format!("bad sigma: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lat = mesh.cell_lattice();
    let vaxis = mesh.dim() - 1;
    let nv = lat.dims[vaxis];
    let nl = means.len();
    let values: Vec<f64> = (0..lat.len())
        .map(|c| {
            let from_top = nv - 1 - lat.ijk(c)[vaxis];
            let layer = (from_top * nl / nv).min(nl - 1);
            means[layer] * 10f64.powf(normal.sample(&mut rng))
        })
        .collect();
    Ok(DiffusionField::isotropic(&values, Units::MdPerCp))
}
