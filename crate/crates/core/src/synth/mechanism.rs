//! Per-node causal mechanisms and their weight blocks.

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};

/// Hidden width of the randomly initialized network mechanisms.
pub const NN_HIDDEN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechanismKind {
    Linear,
    Polynomial,
    Sigmoid,
    Nn,
    NnAdditive,
}

impl MechanismKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(Self::Linear),
            "polynomial" => Some(Self::Polynomial),
            "sigmoid" => Some(Self::Sigmoid),
            "nn" => Some(Self::Nn),
            "nn_additive" => Some(Self::NnAdditive),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Polynomial => "polynomial",
            Self::Sigmoid => "sigmoid",
            Self::Nn => "nn",
            Self::NnAdditive => "nn_additive",
        }
    }
}

/// Either one fixed mechanism kind for every node, or a per-node uniform
/// mixture over the listed kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum MechanismFamily {
    Fixed(MechanismKind),
    Mixture(Vec<MechanismKind>),
}

impl MechanismFamily {
    pub fn parse(s: &str) -> Option<Self> {
        if let Some(k) = MechanismKind::parse(s) {
            return Some(Self::Fixed(k));
        }
        let kinds: Option<Vec<MechanismKind>> =
            s.split('+').map(MechanismKind::parse).collect();
        kinds.filter(|k| !k.is_empty()).map(Self::Mixture)
    }

    pub fn name(&self) -> String {
        match self {
            Self::Fixed(k) => k.name().to_string(),
            Self::Mixture(ks) => ks
                .iter()
                .map(|k| k.name())
                .collect::<Vec<_>>()
                .join("+"),
        }
    }

    pub(crate) fn draw_kind(&self, rng: &mut impl Rng) -> MechanismKind {
        match self {
            Self::Fixed(k) => *k,
            Self::Mixture(ks) => ks[rng.random_range(0..ks.len())],
        }
    }
}

/// Weight blocks for one node's mechanism.
///
/// `sigma2` is the node's noise-scale parameter: effective noise is
/// `0.4 * Normal(0, sigma2)`, shared across regimes.
#[derive(Debug, Clone, PartialEq)]
pub enum MechanismWeights {
    /// Root node: value drawn Uniform(-2, 2), no parents, no weights.
    Root,
    Linear {
        w: Vec<f64>,
    },
    Polynomial {
        w0: f64,
        w1: Vec<f64>,
        w2: Vec<f64>,
    },
    Sigmoid {
        w: Vec<f64>,
    },
    Nn {
        /// (parents + noise input) x hidden
        w_in: Vec<Vec<f64>>,
        w_out: Vec<f64>,
    },
    NnAdditive {
        /// parents x hidden
        w_in: Vec<Vec<f64>>,
        w_out: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MechanismSpec {
    pub kind: MechanismKind,
    pub weights: MechanismWeights,
    pub sigma2: f64,
}

/// Magnitude range for base (regime-0) weights.
pub const BASE_WEIGHT_RANGE: (f64, f64) = (0.5, 2.0);
/// Magnitude range for redrawn intervened weights.
pub const INTERVENED_WEIGHT_RANGE: (f64, f64) = (2.0, 4.0);

/// Signed magnitude draw: Uniform(range) with a random sign.
fn signed_weight(rng: &mut impl Rng, range: (f64, f64)) -> f64 {
    let mag = Uniform::new(range.0, range.1).unwrap().sample(rng);
    if rng.random_bool(0.5) {
        mag
    } else {
        -mag
    }
}

fn weight_vec(rng: &mut impl Rng, len: usize, range: (f64, f64)) -> Vec<f64> {
    (0..len).map(|_| signed_weight(rng, range)).collect()
}

/// Network layer scaled by 1/sqrt(fan_in), times a magnitude multiplier.
fn nn_layer(rng: &mut impl Rng, fan_in: usize, fan_out: usize, scale: f64) -> Vec<Vec<f64>> {
    let std = Normal::new(0.0, 1.0).unwrap();
    let denom = (fan_in.max(1) as f64).sqrt();
    (0..fan_in)
        .map(|_| {
            (0..fan_out)
                .map(|_| std.sample(rng) / denom * scale)
                .collect()
        })
        .collect()
}

impl MechanismSpec {
    /// Draw weights for a node with `n_parents` parents.
    ///
    /// `intervened` switches the weight draw to the modified parameter range
    /// while leaving the noise law untouched.
    pub(crate) fn draw(
        kind: MechanismKind,
        n_parents: usize,
        sigma2: f64,
        intervened: bool,
        rng: &mut impl Rng,
    ) -> Self {
        if n_parents == 0 {
            return MechanismSpec {
                kind,
                weights: MechanismWeights::Root,
                sigma2,
            };
        }
        let range = if intervened {
            INTERVENED_WEIGHT_RANGE
        } else {
            BASE_WEIGHT_RANGE
        };
        // Network weights keep the DCDI-style 1/sqrt(fan_in) scaling; the
        // intervened redraw multiplies magnitudes by a factor from the
        // modified range.
        let nn_scale = if intervened {
            Uniform::new(INTERVENED_WEIGHT_RANGE.0, INTERVENED_WEIGHT_RANGE.1)
                .unwrap()
                .sample(rng)
        } else {
            1.0
        };
        let weights = match kind {
            MechanismKind::Linear => MechanismWeights::Linear {
                w: weight_vec(rng, n_parents, range),
            },
            MechanismKind::Polynomial => MechanismWeights::Polynomial {
                w0: signed_weight(rng, range),
                w1: weight_vec(rng, n_parents, range),
                w2: weight_vec(rng, n_parents, range),
            },
            MechanismKind::Sigmoid => MechanismWeights::Sigmoid {
                w: weight_vec(rng, n_parents, range),
            },
            MechanismKind::Nn => MechanismWeights::Nn {
                w_in: nn_layer(rng, n_parents + 1, NN_HIDDEN, nn_scale),
                w_out: nn_layer(rng, NN_HIDDEN, 1, 1.0)
                    .into_iter()
                    .map(|row| row[0])
                    .collect(),
            },
            MechanismKind::NnAdditive => MechanismWeights::NnAdditive {
                w_in: nn_layer(rng, n_parents, NN_HIDDEN, nn_scale),
                w_out: nn_layer(rng, NN_HIDDEN, 1, 1.0)
                    .into_iter()
                    .map(|row| row[0])
                    .collect(),
            },
        };
        MechanismSpec {
            kind,
            weights,
            sigma2,
        }
    }

    /// Deterministic part + noise injection for one observation.
    ///
    /// `parents` are the parent values in parent order, `eps` is the node's
    /// noise draw for this row.
    pub(crate) fn evaluate(&self, parents: &[f64], eps: f64, uniform_root: f64) -> f64 {
        match &self.weights {
            MechanismWeights::Root => uniform_root,
            MechanismWeights::Linear { w } => {
                dot(parents, w) + eps
            }
            MechanismWeights::Polynomial { w0, w1, w2 } => {
                let det = w0
                    + dot(parents, w1)
                    + parents
                        .iter()
                        .zip(w2)
                        .map(|(x, w)| x * x * w)
                        .sum::<f64>();
                // Multiplicative noise with a small additive floor so a zero
                // deterministic part cannot produce a zero-variance node.
                det * eps + 1e-3 * eps
            }
            MechanismWeights::Sigmoid { w } => {
                parents
                    .iter()
                    .zip(w)
                    .map(|(x, wi)| wi * crate::stats::sigmoid(*x))
                    .sum::<f64>()
                    + eps
            }
            MechanismWeights::Nn { w_in, w_out } => {
                let mut input: Vec<f64> = parents.to_vec();
                input.push(eps);
                tanh_layer(&input, w_in, w_out)
            }
            MechanismWeights::NnAdditive { w_in, w_out } => {
                tanh_layer(parents, w_in, w_out) + eps
            }
        }
    }
}

fn dot(xs: &[f64], ws: &[f64]) -> f64 {
    xs.iter().zip(ws).map(|(x, w)| x * w).sum()
}

fn tanh_layer(input: &[f64], w_in: &[Vec<f64>], w_out: &[f64]) -> f64 {
    let hidden = w_out.len();
    let mut out = 0.0;
    for h in 0..hidden {
        let mut acc = 0.0;
        for (i, x) in input.iter().enumerate() {
            acc += x * w_in[i][h];
        }
        out += acc.tanh() * w_out[h];
    }
    out
}
