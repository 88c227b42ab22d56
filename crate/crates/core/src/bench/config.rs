use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::basis::{BasisConfig, RestrictionMode};
use crate::fe::DepthProfile;
use crate::fv::Units;
use crate::krylov::{Method, SmootherKind, SmootherSpec, SolverSpec};
use crate::mesh::{GridDistortion, Side};
use crate::{Error, Result};

/// One experiment, read from a TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub id: String,
    pub mesh: MeshConfig,
    pub physics: Physics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elasticity: Option<ElasticityConfig>,
    pub coarsening: Coarsening,
    #[serde(default)]
    pub basis: BasisConfig,
    #[serde(default)]
    pub restriction: RestrictionMode,
    #[serde(default)]
    pub runs: Vec<RunConfig>,
    /// Compare the uniterated multiscale solution against a fine-scale reference.
    #[serde(default)]
    pub reference: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub cells: Vec<usize>,
    pub extents: Vec<f64>,
    /// Translation applied after distortion.
    #[serde(default)]
    pub origin: Vec<f64>,
    #[serde(default)]
    pub distortion: GridDistortion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Physics {
    FlowTpfa,
    FlowMpfa,
    Elasticity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub mobility: Mobility,
    #[serde(default)]
    pub bc: Vec<FlowBc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Mobility {
    Uniform {
        value: f64,
        #[serde(default = "si")]
        units: Units,
    },
    Diagonal {
        values: Vec<f64>,
        #[serde(default = "si")]
        units: Units,
    },
    /// Log-normal layers; means in md/cP.
    LayeredLognormal {
        means: Vec<f64>,
        sigma_log10: f64,
        seed: u64,
    },
}

fn si() -> Units {
    Units::Si
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FlowBc {
    Dirichlet {
        side: Side,
        value: f64,
    },
    /// Outward flux density.
    Neumann {
        side: Side,
        value: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElasticityConfig {
    pub young: Young,
    pub poisson: f64,
    #[serde(default)]
    pub bc: Vec<ElasticBc>,
    #[serde(default)]
    pub reservoirs: Vec<Reservoir>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Young {
    Uniform {
        value: f64,
    },
    /// Equal logical layers along the vertical axis, listed top to bottom.
    Layers {
        values: Vec<f64>,
    },
    /// Depth law plus optional per-layer offsets (fractions of the layer mean).
    DepthProfile {
        #[serde(default)]
        params: DepthProfile,
        #[serde(default)]
        layer_offsets: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElasticBc {
    Fixed {
        side: Side,
        direction: usize,
        #[serde(default)]
        value: f64,
    },
    /// Zero normal displacement.
    Roller {
        side: Side,
    },
    Traction {
        side: Side,
        value: Vec<f64>,
    },
}

/// Box of cells (by centroid) loaded by a pore-pressure drop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reservoir {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub dp_bar: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coarsening {
    /// Fine cells (flow) or fine elements (elasticity) per coarse block, per axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<Vec<usize>>,
    /// Coarse elements per axis (elasticity only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<Vec<usize>>,
    /// Target block count for graph agglomeration (flow only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agglomerate: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub method: Method,
    #[serde(default = "yes")]
    pub multiscale: bool,
    #[serde(default)]
    pub pre: SmootherSpec,
    #[serde(default)]
    pub post: SmootherSpec,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart: Option<usize>,
}

fn yes() -> bool {
    true
}

fn default_tol() -> f64 {
    1e-8
}

fn default_max_iters() -> usize {
    500
}

impl RunConfig {
    pub fn solver(&self) -> SolverSpec {
        SolverSpec {
            method: self.method,
            tol: self.tol,
            max_iters: self.max_iters,
            restart: self.restart,
        }
    }

    /// The smoother that names the run: post if present, else pre.
    pub fn smoother(&self) -> SmootherSpec {
        if self.post.kind != SmootherKind::None {
            self.post
        } else {
            self.pre
        }
    }

    /// `{METHOD}_{multiscale|smoother}_{SMOOTHER}x{sweeps}`.
    pub fn label(&self) -> String {
        let stage = if self.multiscale {
            "multiscale"
        } else {
            "smoother"
        };
        format!("{}_{}_{}", self.method.tag(), stage, self.smoother())
    }

    /// Short column heading for sweep tables.
    pub fn column(&self) -> String {
        let s = self.smoother().kind.tag();
        if self.multiscale {
            format!("MsRSB+{s}")
        } else {
            s.to_string()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub vary: Vary,
    /// Refinement: number of levels, each doubling the cells per axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    /// Coarsening: alternative `coarsening.count` vectors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vary {
    Refinement,
    Smoother,
    Coarsening,
}

impl CaseConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let cfg = Self::from_toml(&text).map_err(|msg| Error::Parse {
            path: path.to_path_buf(),
            msg,
        })?;
        cfg.validate().map_err(|e| cfg.wrap(e))?;
        Ok(cfg)
    }

    pub fn dim(&self) -> usize {
        self.mesh.cells.len()
    }

    pub(crate) fn wrap(&self, e: Error) -> Error {
        match e {
            Error::Case { .. } => e,
            other => Error::Case {
                case: self.id.clone(),
                inner: Box::new(other),
            },
        }
    }

    /// Checks everything that can be checked without building the mesh.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        if self.id.is_empty() || self.id.contains(['/', '\\']) {
            return Err(Error::invalid(
                "case id must be a non-empty file-name-safe string",
            ));
        }
        if !(2..=3).contains(&dim) || self.mesh.extents.len() != dim {
            return Err(Error::invalid(
                "mesh.cells and mesh.extents must both have 2 or 3 entries",
            ));
        }
        if !self.mesh.origin.is_empty() && self.mesh.origin.len() != dim {
            return Err(Error::invalid("mesh.origin must match the mesh dimension"));
        }
        self.basis.validate()?;
        let c = &self.coarsening;
        let set = [
            c.ratio.is_some(),
            c.count.is_some(),
            c.agglomerate.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if set != 1 {
            return Err(Error::invalid(
                "coarsening needs exactly one of ratio, count, agglomerate",
            ));
        }
        for v in [&c.ratio, &c.count].into_iter().flatten() {
            if v.len() != dim {
                return Err(Error::invalid(
                    "coarsening vector must match the mesh dimension",
                ));
            }
        }
        if let Some(r) = &c.ratio {
            if let Some(&bad) = r.iter().find(|&&r| r < 2) {
                return Err(Error::invalid(format!("coarsening ratio {bad} is below 2")));
            }
        }
        match self.physics {
            Physics::FlowTpfa | Physics::FlowMpfa => {
                if self.flow.is_none() {
                    return Err(Error::invalid("flow physics needs a [flow] table"));
                }
                if c.count.is_some() {
                    return Err(Error::invalid(
                        "coarsening.count is only available for elasticity",
                    ));
                }
            }
            Physics::Elasticity => {
                let el = self
                    .elasticity
                    .as_ref()
                    .ok_or_else(|| Error::invalid("elasticity needs an [elasticity] table"))?;
                if c.agglomerate.is_some() {
                    return Err(Error::invalid("agglomeration is only available for flow"));
                }
                if self.restriction != RestrictionMode::Galerkin {
                    return Err(Error::invalid(
                        "control-volume restriction is only defined for scalar problems",
                    ));
                }
                if self.reference {
                    return Err(Error::invalid(
                        "reference error is only computed for flow cases",
                    ));
                }
                if let Young::Layers { values } = &el.young {
                    if values.is_empty() {
                        return Err(Error::invalid(
                            "layered Young's modulus needs at least one value",
                        ));
                    }
                }
                for r in &el.reservoirs {
                    if r.min.len() != dim || r.max.len() != dim {
                        return Err(Error::invalid(
                            "reservoir box must match the mesh dimension",
                        ));
                    }
                }
                for bc in &el.bc {
                    match bc {
                        ElasticBc::Fixed { direction, .. } if *direction >= dim => {
                            return Err(Error::invalid(format!(
                                "displacement direction {direction} out of range"
                            )));
                        }
                        ElasticBc::Traction { value, .. } if value.len() != dim => {
                            return Err(Error::invalid(
                                "traction vector must match the mesh dimension",
                            ));
                        }
                        _ => {}
                    }
                }
            }
        }
        for run in &self.runs {
            run.solver().validate()?;
            run.pre.validate()?;
            run.post.validate()?;
            if !run.multiscale && run.smoother().kind == SmootherKind::None {
                return Err(Error::invalid(format!(
                    "run {} has neither a multiscale stage nor a smoother",
                    run.label()
                )));
            }
        }
        if let Some(s) = &self.sweep {
            match s.vary {
                Vary::Refinement if s.levels.unwrap_or(0) == 0 => {
                    return Err(Error::invalid("refinement sweep needs levels >= 1"));
                }
                Vary::Coarsening => {
                    let counts = s
                        .counts
                        .as_ref()
                        .ok_or_else(|| Error::invalid("coarsening sweep needs counts"))?;
                    if c.count.is_none() || counts.iter().any(|v| v.len() != dim) {
                        return Err(Error::invalid("coarsening sweep varies coarsening.count"));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Sweep members, or the case itself.
    pub fn expand(&self) -> Vec<CaseConfig> {
        let Some(s) = &self.sweep else {
            return vec![self.clone()];
        };
        let base = CaseConfig {
            sweep: None,
            ..self.clone()
        };
        match s.vary {
            Vary::Smoother => vec![base],
            Vary::Refinement => (0..s.levels.unwrap_or(1))
                .map(|l| {
                    let mut c = base.clone();
                    c.id = format!("{}_l{l}", self.id);
                    c.mesh.cells.iter_mut().for_each(|n| *n <<= l);
                    if let Some(cnt) = &mut c.coarsening.count {
                        cnt.iter_mut().for_each(|n| *n <<= l);
                    }
                    c
                })
                .collect(),
            Vary::Coarsening => s
                .counts
                .iter()
                .flatten()
                .map(|cnt| {
                    let mut c = base.clone();
                    let tag: Vec<String> = cnt.iter().map(|n| n.to_string()).collect();
                    c.id = format!("{}_c{}", self.id, tag.join("x"));
                    c.coarsening.count = Some(cnt.clone());
                    c
                })
                .collect(),
        }
    }

    /// Replaces every random seed in the case.
    pub fn override_seed(&mut self, seed: u64) {
        self.mesh.distortion.seed = seed;
        if let Some(FlowConfig {
            mobility: Mobility::LayeredLognormal { seed: s, .. },
            ..
        }) = &mut self.flow
        {
            *s = seed;
        }
    }

    pub fn override_tol(&mut self, tol: f64) {
        self.runs.iter_mut().for_each(|r| r.tol = tol);
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            method: Method::Gmres,
            multiscale: true,
            pre: SmootherSpec::none(),
            post: SmootherSpec::none(),
            tol: default_tol(),
            max_iters: default_max_iters(),
            restart: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMOKE: &str = r#"
        id = "smoke"
        physics = "flow_tpfa"
        [mesh]
        cells = [4, 4]
        extents = [1.0, 1.0]
        [flow]
        mobility = { kind = "uniform", value = 1.0 }
        bc = [{ kind = "dirichlet", side = "xmin", value = 1.0 }]
        [coarsening]
        ratio = [2, 2]
        [[runs]]
        method = "cg"
        post = { kind = "sgs" }
    "#;

    #[test]
    fn parses_and_validates() {
        let c = CaseConfig::from_toml(SMOKE).unwrap();
        c.validate().unwrap();
        assert_eq!(c.runs[0].label(), "CG_multiscale_SGSx1");
        assert_eq!(c.runs[0].tol, 1e-8);
        assert_eq!(c.basis, BasisConfig::default());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_ratio() {
        assert!(CaseConfig::from_toml(&SMOKE.replace("physics", "physic")).is_err());
        let c = CaseConfig::from_toml(&SMOKE.replace("ratio = [2, 2]", "ratio = [1, 2]")).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn refinement_expansion() {
        let mut c = CaseConfig::from_toml(SMOKE).unwrap();
        c.sweep = Some(SweepConfig {
            vary: Vary::Refinement,
            levels: Some(3),
            counts: None,
        });
        let e = c.expand();
        assert_eq!(e.len(), 3);
        assert_eq!(e[2].mesh.cells, vec![16, 16]);
        assert_eq!(e[2].coarsening.ratio, Some(vec![2, 2]));
        assert_eq!(e[1].id, "smoke_l1");
    }

    #[test]
    fn round_trip() {
        let c = CaseConfig::from_toml(SMOKE).unwrap();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(CaseConfig::from_toml(&text).unwrap(), c);
    }
}
