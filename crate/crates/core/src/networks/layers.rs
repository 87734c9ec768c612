use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::tensor::{ParamId, ParamSet, Tape, Tensor, Var};

/// Adds freshly initialized tensors to a [`ParamSet`] under a name prefix.
pub(crate) struct Init<'a, R: Rng> {
    pub params: &'a mut ParamSet,
    pub rng: &'a mut R,
}

impl<R: Rng> Init<'_, R> {
    pub fn matrix(&mut self, name: String, rows: usize, cols: usize) -> ParamId {
        self.params.add(name, Tensor::xavier(vec![rows, cols], self.rng))
    }

    pub fn bias(&mut self, name: String, n: usize) -> ParamId {
        self.params.add(name, Tensor::zeros(vec![n]))
    }

    pub fn gaussian(&mut self, name: String, n: usize, sd: f64) -> ParamId {
        let normal = Normal::new(0.0, sd).expect("positive standard deviation");
        let data = (0..n).map(|_| normal.sample(self.rng)).collect();
        let t = Tensor::new(vec![n], data).expect("gaussian draws are finite");
        self.params.add(name, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Identity,
    Relu,
    Sigmoid,
    Tanh,
}

impl Activation {
    fn apply(self, tape: &mut Tape<'_>, x: Var) -> Var {
        match self {
            Activation::Identity => x,
            Activation::Relu => tape.relu(x),
            Activation::Sigmoid => tape.sigmoid(x),
            Activation::Tanh => tape.tanh(x),
        }
    }
}

/// Fully connected layer `act(W x + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub w: ParamId,
    pub b: ParamId,
    pub out: usize,
    pub act: Activation,
}

impl Dense {
    pub(crate) fn init<R: Rng>(
        init: &mut Init<'_, R>,
        name: &str,
        input: usize,
        out: usize,
        act: Activation,
    ) -> Self {
        Self {
            w: init.matrix(format!("{name}.w"), out, input),
            b: init.bias(format!("{name}.b"), out),
            out,
            act,
        }
    }

    pub fn bind(&self, tape: &mut Tape<'_>) -> BoundDense {
        BoundDense {
            w: tape.param(self.w),
            b: tape.param(self.b),
            act: self.act,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BoundDense {
    w: Var,
    b: Var,
    act: Activation,
}

impl BoundDense {
    pub fn apply(&self, tape: &mut Tape<'_>, x: Var) -> Var {
        let y = tape.linear(self.w, x, self.b);
        self.act.apply(tape, y)
    }
}

/// Applies a stack of bound layers in order; an empty stack is the identity.
pub fn apply_stack(tape: &mut Tape<'_>, layers: &[BoundDense], x: Var) -> Var {
    layers.iter().fold(x, |h, l| l.apply(tape, h))
}

/// Gated recurrent unit with width `h` and input width `n`.
///
/// `w` stacks the input maps `[W_z; W_r; W_h]` (3h x n), `u_zr` the
/// recurrent maps `[U_z; U_r]` (2h x h), `u_h` is `U_h` (h x h) and `b`
/// stacks `[b_z; b_r; b_h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GruCell {
    pub w: ParamId,
    pub u_zr: ParamId,
    pub u_h: ParamId,
    pub b: ParamId,
    pub width: usize,
}

impl GruCell {
    pub(crate) fn init<R: Rng>(init: &mut Init<'_, R>, name: &str, input: usize, width: usize) -> Self {
        Self {
            w: init.matrix(format!("{name}.w"), 3 * width, input),
            u_zr: init.matrix(format!("{name}.u_zr"), 2 * width, width),
            u_h: init.matrix(format!("{name}.u_h"), width, width),
            b: init.bias(format!("{name}.b"), 3 * width),
            width,
        }
    }

    pub fn bind(&self, tape: &mut Tape<'_>) -> BoundGru {
        BoundGru {
            w: tape.param(self.w),
            u_zr: tape.param(self.u_zr),
            u_h: tape.param(self.u_h),
            b: tape.param(self.b),
            width: self.width,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BoundGru {
    w: Var,
    u_zr: Var,
    u_h: Var,
    b: Var,
    width: usize,
}

/// One GRU update:
///
/// ```text
/// z  = sigmoid(W_z x + U_z h + b_z)
/// r  = sigmoid(W_r x + U_r h + b_r)
/// h~ = tanh(W_h x + U_h (r * h) + b_h)
/// h' = (1 - z) * h + z * h~
/// ```
pub fn gru_step(tape: &mut Tape<'_>, cell: &BoundGru, x: Var, h_prev: Var) -> Var {
    let n = cell.width;
    let wx = tape.linear(cell.w, x, cell.b);
    let uh = tape.matvec(cell.u_zr, h_prev);
    let wx_zr = tape.slice(wx, 0, 2 * n);
    let pre_zr = tape.add(wx_zr, uh);
    let zr = tape.sigmoid(pre_zr);
    let z = tape.slice(zr, 0, n);
    let r = tape.slice(zr, n, n);
    let rh = tape.mul(r, h_prev);
    let u_rh = tape.matvec(cell.u_h, rh);
    let wx_h = tape.slice(wx, 2 * n, n);
    let pre_h = tape.add(wx_h, u_rh);
    let cand = tape.tanh(pre_h);
    let delta = tape.sub(cand, h_prev);
    let step = tape.mul(z, delta);
    tape.add(h_prev, step)
}

/// Runs stacked cells over a sequence, left to right or right to left.
/// Outputs are indexed by position in both cases.
fn run_direction(tape: &mut Tape<'_>, cells: &[BoundGru], inputs: &[Var], reverse: bool) -> Vec<Var> {
    let mut seq = inputs.to_vec();
    for cell in cells {
        let mut h = tape.constant(vec![0.0; cell.width]);
        let mut out = vec![h; seq.len()];
        let order: Box<dyn Iterator<Item = usize>> = if reverse {
            Box::new((0..seq.len()).rev())
        } else {
            Box::new(0..seq.len())
        };
        for t in order {
            h = gru_step(tape, cell, seq[t], h);
            out[t] = h;
        }
        seq = out;
    }
    seq
}

/// Forward and reverse stacks; each direction stacks on its own outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct BiEncoder {
    pub forward: Vec<GruCell>,
    pub reverse: Vec<GruCell>,
    pub width: usize,
}

impl BiEncoder {
    pub(crate) fn init<R: Rng>(
        init: &mut Init<'_, R>,
        name: &str,
        input: usize,
        layers: usize,
        width: usize,
    ) -> Self {
        let mut stack = |dir: &str| {
            (0..layers)
                .map(|l| {
                    let n_in = if l == 0 { input } else { width };
                    GruCell::init(init, &format!("{name}.{dir}{l}"), n_in, width)
                })
                .collect::<Vec<_>>()
        };
        let forward = stack("fwd");
        let reverse = stack("rev");
        Self {
            forward,
            reverse,
            width,
        }
    }

    pub fn bind(&self, tape: &mut Tape<'_>) -> BoundEncoder {
        BoundEncoder {
            forward: self.forward.iter().map(|c| c.bind(tape)).collect(),
            reverse: self.reverse.iter().map(|c| c.bind(tape)).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundEncoder {
    forward: Vec<BoundGru>,
    reverse: Vec<BoundGru>,
}

/// Top-layer states of both directions, indexed by position.
#[derive(Debug, Clone)]
pub struct Encoded {
    pub forward: Vec<Var>,
    pub reverse: Vec<Var>,
    /// `h_t = h_t^f (+) h_t^r`.
    pub joint: Vec<Var>,
}

/// Forward pass from a zero state left to right, reverse pass from a zero
/// state right to left, concatenated per position.
pub fn encode_bidirectional(tape: &mut Tape<'_>, enc: &BoundEncoder, inputs: &[Var]) -> Encoded {
    let forward = run_direction(tape, &enc.forward, inputs, false);
    let reverse = run_direction(tape, &enc.reverse, inputs, true);
    let joint = forward
        .iter()
        .zip(&reverse)
        .map(|(&f, &r)| tape.concat(&[f, r]))
        .collect();
    Encoded {
        forward,
        reverse,
        joint,
    }
}

/// Attention pooling parameters: projection `C` and context vector `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Attention {
    pub proj: Dense,
    pub context: ParamId,
}

impl Attention {
    pub(crate) fn init<R: Rng>(init: &mut Init<'_, R>, name: &str, input: usize, width: usize) -> Self {
        Self {
            proj: Dense::init(init, &format!("{name}.proj"), input, width, Activation::Tanh),
            context: init.gaussian(format!("{name}.context"), width, 0.1),
        }
    }

    /// Adds freshly initialized attention parameters to `params`.
    pub fn new<R: Rng>(params: &mut ParamSet, rng: &mut R, name: &str, input: usize, width: usize) -> Self {
        Self::init(&mut Init { params, rng }, name, input, width)
    }

    pub fn bind(&self, tape: &mut Tape<'_>) -> BoundAttention {
        BoundAttention {
            proj: self.proj.bind(tape),
            context: tape.param(self.context),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BoundAttention {
    proj: BoundDense,
    context: Var,
}

/// `phi_j = max_t u_{j,t}` plus the winning position per coordinate.
pub fn aggregate_max(tape: &mut Tape<'_>, items: &[Var]) -> (Var, Vec<usize>) {
    tape.max_over(items)
}

/// `phi = sum_t a_t u_t` with `a = softmax_t(<c, tanh(W u_t + b)>)`.
/// Returns the pooled vector and the attention weights.
pub fn aggregate_attention(tape: &mut Tape<'_>, att: &BoundAttention, items: &[Var]) -> (Var, Var) {
    let scores: Vec<Var> = items
        .iter()
        .map(|&u| {
            let c_t = att.proj.apply(tape, u);
            tape.dot(att.context, c_t)
        })
        .collect();
    let scores = tape.concat(&scores);
    let weights = tape.softmax(scores);
    (tape.weighted_sum(weights, items), weights)
}
