use super::{sigmoid, softmax_unchecked, Gradients, ParamId, ParamSet, PROB_FLOOR};
use crate::error::{Error, Result};

/// Handle to a node recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Debug)]
enum Op {
    Param(ParamId),
    Constant,
    Row { table: ParamId, row: usize },
    MatVec { w: Var, x: Var },
    Linear { w: Var, x: Var, b: Var },
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Affine { x: Var, scale: f64 },
    Sigmoid(Var),
    Tanh(Var),
    Relu(Var),
    Concat(Vec<Var>),
    Slice { x: Var, start: usize },
    Dot(Var, Var),
    MaxOver { items: Vec<Var>, argmax: Vec<usize> },
    WeightedSum { weights: Var, items: Vec<Var> },
    Softmax(Var),
    CrossEntropy { probs: Var, label: usize },
    SumSquares(Var),
    Sum(Var),
}

#[derive(Debug)]
struct Node {
    op: Op,
    shape: (usize, usize),
    /// Empty for `Param` nodes, whose value lives in the borrowed [`ParamSet`].
    value: Vec<f64>,
}

/// Records operations in execution order for a single forward pass.
///
/// Shapes are at most 2-D: `(rows, cols)`, with vectors stored as `(n, 1)`.
pub struct Tape<'p> {
    params: &'p ParamSet,
    nodes: Vec<Node>,
}

impl<'p> Tape<'p> {
    pub fn new(params: &'p ParamSet) -> Self {
        Self {
            params,
            nodes: Vec::with_capacity(256),
        }
    }

    pub fn params(&self) -> &'p ParamSet {
        self.params
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &[f64] {
        match self.nodes[v.0].op {
            Op::Param(id) => self.params.get(id).data(),
            _ => &self.nodes[v.0].value,
        }
    }

    /// Scalar value of a one-element node.
    pub fn scalar(&self, v: Var) -> f64 {
        self.value(v)[0]
    }

    pub fn shape(&self, v: Var) -> (usize, usize) {
        self.nodes[v.0].shape
    }

    pub fn dim(&self, v: Var) -> usize {
        let (r, c) = self.shape(v);
        r * c
    }

    fn push(&mut self, op: Op, shape: (usize, usize), value: Vec<f64>) -> Var {
        debug_assert!(matches!(op, Op::Param(_)) || value.len() == shape.0 * shape.1);
        self.nodes.push(Node { op, shape, value });
        Var(self.nodes.len() - 1)
    }

    pub fn param(&mut self, id: ParamId) -> Var {
        let t = self.params.get(id);
        let shape = (t.rows(), t.cols());
        self.push(Op::Param(id), shape, Vec::new())
    }

    pub fn constant(&mut self, value: Vec<f64>) -> Var {
        let n = value.len();
        self.push(Op::Constant, (n, 1), value)
    }

    /// Row `row` of a 2-D parameter (embedding lookup).
    pub fn row(&mut self, table: ParamId, row: usize) -> Var {
        let t = self.params.get(table);
        let value = t.row(row).to_vec();
        let n = value.len();
        self.push(Op::Row { table, row }, (n, 1), value)
    }

    pub fn matvec(&mut self, w: Var, x: Var) -> Var {
        let (r, c) = self.shape(w);
        assert_eq!(c, self.dim(x), "matvec: {r}x{c} matrix with {}-vector", self.dim(x));
        let wv = self.value(w);
        let xv = self.value(x);
        let out = (0..r).map(|i| dot(&wv[i * c..(i + 1) * c], xv)).collect();
        self.push(Op::MatVec { w, x }, (r, 1), out)
    }

    /// `w x + b`.
    pub fn linear(&mut self, w: Var, x: Var, b: Var) -> Var {
        let (r, c) = self.shape(w);
        assert_eq!(c, self.dim(x), "linear: {r}x{c} matrix with {}-vector", self.dim(x));
        assert_eq!(r, self.dim(b), "linear: bias length");
        let wv = self.value(w);
        let xv = self.value(x);
        let bv = self.value(b);
        let out = (0..r)
            .map(|i| dot(&wv[i * c..(i + 1) * c], xv) + bv[i])
            .collect();
        self.push(Op::Linear { w, x, b }, (r, 1), out)
    }

    fn zip_with(&mut self, a: Var, b: Var, op: Op, f: impl Fn(f64, f64) -> f64) -> Var {
        assert_eq!(self.dim(a), self.dim(b), "elementwise op on mismatched lengths");
        let out = self
            .value(a)
            .iter()
            .zip(self.value(b))
            .map(|(x, y)| f(*x, *y))
            .collect();
        let shape = self.shape(a);
        self.push(op, shape, out)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        self.zip_with(a, b, Op::Add(a, b), |x, y| x + y)
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        self.zip_with(a, b, Op::Sub(a, b), |x, y| x - y)
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        self.zip_with(a, b, Op::Mul(a, b), |x, y| x * y)
    }

    /// `scale * x + shift` with constant coefficients.
    pub fn affine(&mut self, x: Var, scale: f64, shift: f64) -> Var {
        let out = self.value(x).iter().map(|v| scale * v + shift).collect();
        let shape = self.shape(x);
        self.push(Op::Affine { x, scale }, shape, out)
    }

    fn map(&mut self, x: Var, op: Op, f: impl Fn(f64) -> f64) -> Var {
        let out = self.value(x).iter().map(|v| f(*v)).collect();
        let shape = self.shape(x);
        self.push(op, shape, out)
    }

    pub fn sigmoid(&mut self, x: Var) -> Var {
        self.map(x, Op::Sigmoid(x), sigmoid)
    }

    pub fn tanh(&mut self, x: Var) -> Var {
        self.map(x, Op::Tanh(x), f64::tanh)
    }

    pub fn relu(&mut self, x: Var) -> Var {
        self.map(x, Op::Relu(x), |v| v.max(0.0))
    }

    pub fn concat(&mut self, parts: &[Var]) -> Var {
        let mut out = Vec::with_capacity(parts.iter().map(|p| self.dim(*p)).sum());
        for p in parts {
            out.extend_from_slice(self.value(*p));
        }
        let n = out.len();
        self.push(Op::Concat(parts.to_vec()), (n, 1), out)
    }

    pub fn slice(&mut self, x: Var, start: usize, len: usize) -> Var {
        let out = self.value(x)[start..start + len].to_vec();
        self.push(Op::Slice { x, start }, (len, 1), out)
    }

    pub fn dot(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.dim(a), self.dim(b), "dot on mismatched lengths");
        let v = dot(self.value(a), self.value(b));
        self.push(Op::Dot(a, b), (1, 1), vec![v])
    }

    /// Element-wise maximum over a non-empty list of equal-length vectors.
    ///
    /// Returns the pooled vector and, per coordinate, the index of the winning
    /// item (earliest on ties).
    pub fn max_over(&mut self, items: &[Var]) -> (Var, Vec<usize>) {
        assert!(!items.is_empty(), "max_over needs at least one item");
        let d = self.dim(items[0]);
        let mut out = self.value(items[0]).to_vec();
        let mut arg = vec![0usize; d];
        for (t, it) in items.iter().enumerate().skip(1) {
            let v = self.value(*it);
            assert_eq!(v.len(), d, "max_over on mismatched lengths");
            for j in 0..d {
                if v[j] > out[j] {
                    out[j] = v[j];
                    arg[j] = t;
                }
            }
        }
        let var = self.push(
            Op::MaxOver {
                items: items.to_vec(),
                argmax: arg.clone(),
            },
            (d, 1),
            out,
        );
        (var, arg)
    }

    /// `sum_t weights[t] * items[t]`.
    pub fn weighted_sum(&mut self, weights: Var, items: &[Var]) -> Var {
        assert_eq!(self.dim(weights), items.len(), "one weight per item");
        let d = self.dim(items[0]);
        let mut out = vec![0.0; d];
        for (t, it) in items.iter().enumerate() {
            let w = self.value(weights)[t];
            for (o, v) in out.iter_mut().zip(self.value(*it)) {
                *o += w * v;
            }
        }
        self.push(
            Op::WeightedSum {
                weights,
                items: items.to_vec(),
            },
            (d, 1),
            out,
        )
    }

    pub fn softmax(&mut self, x: Var) -> Var {
        let out = softmax_unchecked(self.value(x));
        let n = out.len();
        self.push(Op::Softmax(x), (n, 1), out)
    }

    /// `-ln(probs[label] + PROB_FLOOR)`.
    pub fn cross_entropy(&mut self, probs: Var, label: usize) -> Result<Var> {
        let p = *self.value(probs).get(label).ok_or_else(|| {
            Error::contract(format!("label {label} out of range for {} classes", self.dim(probs)))
        })?;
        let v = -(p + PROB_FLOOR).ln();
        Ok(self.push(Op::CrossEntropy { probs, label }, (1, 1), vec![v]))
    }

    pub fn sum_squares(&mut self, x: Var) -> Var {
        let v = self.value(x).iter().map(|v| v * v).sum();
        self.push(Op::SumSquares(x), (1, 1), vec![v])
    }

    pub fn sum(&mut self, x: Var) -> Var {
        let v = self.value(x).iter().sum();
        self.push(Op::Sum(x), (1, 1), vec![v])
    }

    /// Reverse sweep from a scalar node, adding parameter gradients into `grads`.
    ///
    /// Nodes are visited in exact reverse order of recording; adjoints are summed,
    /// so a value used along several paths receives the sum of their contributions.
    /// Parameters with `requires_grad == false` are skipped.
    pub fn backward(&self, loss: Var, grads: &mut Gradients) -> Result<()> {
        if self.dim(loss) != 1 {
            return Err(Error::contract("backward needs a scalar loss"));
        }
        let l = self.scalar(loss);
        if !l.is_finite() {
            return Err(Error::non_finite(format!("loss ({l})")));
        }
        let mut adj: Vec<Vec<f64>> = Vec::with_capacity(loss.0 + 1);
        adj.resize_with(loss.0 + 1, Vec::new);
        adj[loss.0] = vec![1.0];

        for i in (0..=loss.0).rev() {
            let g = std::mem::take(&mut adj[i]);
            if g.is_empty() {
                continue;
            }
            let node = &self.nodes[i];
            match &node.op {
                Op::Constant => {}
                Op::Param(id) => {
                    if self.params.get(*id).requires_grad() {
                        add_into(grads.get_mut(*id), &g);
                    }
                }
                Op::Row { table, row } => {
                    let t = self.params.get(*table);
                    if t.requires_grad() {
                        let c = t.cols();
                        add_into(&mut grads.get_mut(*table)[row * c..(row + 1) * c], &g);
                    }
                }
                Op::MatVec { w, x } => self.back_matvec(&mut adj, *w, *x, &g),
                Op::Linear { w, x, b } => {
                    self.back_matvec(&mut adj, *w, *x, &g);
                    accumulate(&mut adj, *b, &g);
                }
                Op::Add(a, b) => {
                    accumulate(&mut adj, *a, &g);
                    accumulate(&mut adj, *b, &g);
                }
                Op::Sub(a, b) => {
                    accumulate(&mut adj, *a, &g);
                    let neg: Vec<f64> = g.iter().map(|v| -v).collect();
                    accumulate(&mut adj, *b, &neg);
                }
                Op::Mul(a, b) => {
                    let ga: Vec<f64> = g.iter().zip(self.value(*b)).map(|(g, y)| g * y).collect();
                    let gb: Vec<f64> = g.iter().zip(self.value(*a)).map(|(g, x)| g * x).collect();
                    accumulate(&mut adj, *a, &ga);
                    accumulate(&mut adj, *b, &gb);
                }
                Op::Affine { x, scale } => {
                    let gx: Vec<f64> = g.iter().map(|v| v * scale).collect();
                    accumulate(&mut adj, *x, &gx);
                }
                Op::Sigmoid(x) => {
                    let gx: Vec<f64> = g
                        .iter()
                        .zip(&node.value)
                        .map(|(g, s)| g * s * (1.0 - s))
                        .collect();
                    accumulate(&mut adj, *x, &gx);
                }
                Op::Tanh(x) => {
                    let gx: Vec<f64> = g
                        .iter()
                        .zip(&node.value)
                        .map(|(g, t)| g * (1.0 - t * t))
                        .collect();
                    accumulate(&mut adj, *x, &gx);
                }
                Op::Relu(x) => {
                    let gx: Vec<f64> = g
                        .iter()
                        .zip(self.value(*x))
                        .map(|(g, v)| if *v > 0.0 { *g } else { 0.0 })
                        .collect();
                    accumulate(&mut adj, *x, &gx);
                }
                Op::Concat(parts) => {
                    let mut off = 0;
                    for p in parts {
                        let n = self.dim(*p);
                        accumulate(&mut adj, *p, &g[off..off + n]);
                        off += n;
                    }
                }
                Op::Slice { x, start } => {
                    let n = self.dim(*x);
                    let slot = slot(&mut adj, *x, n);
                    add_into(&mut slot[*start..start + g.len()], &g);
                }
                Op::Dot(a, b) => {
                    let s = g[0];
                    let ga: Vec<f64> = self.value(*b).iter().map(|y| s * y).collect();
                    let gb: Vec<f64> = self.value(*a).iter().map(|x| s * x).collect();
                    accumulate(&mut adj, *a, &ga);
                    accumulate(&mut adj, *b, &gb);
                }
                Op::MaxOver { items, argmax } => {
                    for (j, &t) in argmax.iter().enumerate() {
                        let it = items[t];
                        let n = self.dim(it);
                        slot(&mut adj, it, n)[j] += g[j];
                    }
                }
                Op::WeightedSum { weights, items } => {
                    let wv = self.value(*weights);
                    let gw: Vec<f64> = items.iter().map(|it| dot(&g, self.value(*it))).collect();
                    for (t, it) in items.iter().enumerate() {
                        let gi: Vec<f64> = g.iter().map(|v| v * wv[t]).collect();
                        accumulate(&mut adj, *it, &gi);
                    }
                    accumulate(&mut adj, *weights, &gw);
                }
                Op::Softmax(x) => {
                    let p = &node.value;
                    let s = dot(&g, p);
                    let gx: Vec<f64> = g.iter().zip(p).map(|(g, p)| p * (g - s)).collect();
                    accumulate(&mut adj, *x, &gx);
                }
                Op::CrossEntropy { probs, label } => {
                    let n = self.dim(*probs);
                    let p = self.value(*probs)[*label];
                    slot(&mut adj, *probs, n)[*label] -= g[0] / (p + PROB_FLOOR);
                }
                Op::SumSquares(x) => {
                    let gx: Vec<f64> = self.value(*x).iter().map(|v| 2.0 * v * g[0]).collect();
                    accumulate(&mut adj, *x, &gx);
                }
                Op::Sum(x) => {
                    let n = self.dim(*x);
                    let gx = vec![g[0]; n];
                    accumulate(&mut adj, *x, &gx);
                }
            }
        }
        Ok(())
    }

    fn back_matvec(&self, adj: &mut [Vec<f64>], w: Var, x: Var, g: &[f64]) {
        let (r, c) = self.shape(w);
        let wv = self.value(w);
        let xv = self.value(x);
        {
            let gw = slot(adj, w, r * c);
            for i in 0..r {
                if g[i] != 0.0 {
                    let row = &mut gw[i * c..(i + 1) * c];
                    for (o, xj) in row.iter_mut().zip(xv) {
                        *o += g[i] * xj;
                    }
                }
            }
        }
        let gx = slot(adj, x, c);
        for i in 0..r {
            if g[i] != 0.0 {
                for (o, wij) in gx.iter_mut().zip(&wv[i * c..(i + 1) * c]) {
                    *o += g[i] * wij;
                }
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

fn slot(adj: &mut [Vec<f64>], v: Var, n: usize) -> &mut Vec<f64> {
    let s = &mut adj[v.0];
    if s.is_empty() {
        s.resize(n, 0.0);
    }
    s
}

fn accumulate(adj: &mut [Vec<f64>], v: Var, g: &[f64]) {
    let s = slot(adj, v, g.len());
    add_into(s, g);
}
