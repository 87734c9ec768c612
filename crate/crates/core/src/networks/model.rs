use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::layers::{
    aggregate_attention, aggregate_max, apply_stack, encode_bidirectional, Activation, Attention,
    BiEncoder, BoundDense, Dense, Init,
};
use super::{Aggregator, Family, ModelConfig, CNN_WIDTHS};
use crate::corpus::Document;
use crate::embeddings::{Vocabulary, WordVectors};
use crate::error::{Error, Result};
use crate::tensor::{ParamId, ParamSet, Tape, Tensor, Var};

/// Token indices of one document plus its sentence ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Input {
    pub ids: Vec<usize>,
    pub sentences: Vec<Range<usize>>,
}

impl Input {
    /// The whole sequence as a single sentence.
    pub fn flat(ids: Vec<usize>) -> Self {
        let n = ids.len();
        Self {
            ids,
            sentences: vec![0..n],
        }
    }
}

/// Scores `u_{j,t}` of the interpretable model, `classes x len`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceMatrix {
    classes: usize,
    len: usize,
    values: Vec<f64>,
}

impl ImportanceMatrix {
    pub fn new(classes: usize, len: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != classes * len {
            return Err(Error::contract(format!(
                "importance matrix {classes}x{len} needs {} values, got {}",
                classes * len,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::contract(format!("importance score {v} outside [0, 1]")));
        }
        Ok(Self {
            classes,
            len,
            values,
        })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, class: usize, t: usize) -> f64 {
        self.values[class * self.len + t]
    }

    pub fn class_row(&self, class: usize) -> &[f64] {
        &self.values[class * self.len..(class + 1) * self.len]
    }

    /// Max over classes per position.
    pub fn token_scores(&self) -> Vec<f64> {
        (0..self.len)
            .map(|t| {
                (0..self.classes)
                    .map(|j| self.get(j, t))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }

    /// Position holding the largest score for `class` (earliest on ties).
    pub fn argmax_position(&self, class: usize) -> usize {
        crate::tensor::argmax(self.class_row(class))
    }

    /// Element-wise max over positions, i.e. the interpretable model's logits.
    pub fn pooled(&self) -> Vec<f64> {
        (0..self.classes)
            .map(|j| self.class_row(j).iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub probs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub importance: Option<ImportanceMatrix>,
}

/// Handles into a recorded forward pass.
#[derive(Debug, Clone)]
pub struct Forward {
    pub probs: Var,
    /// Pooled document representation `phi` (the logits for the interpretable model).
    pub phi: Var,
    /// Per-position `u_t` of flat recurrent models; empty otherwise.
    pub u: Vec<Var>,
}

#[derive(Debug, Clone, PartialEq)]
struct RecurrentLayout {
    encoder: BiEncoder,
    g: Vec<Dense>,
    attention: Option<Attention>,
    sentence_encoder: Option<BiEncoder>,
    sentence_attention: Option<Attention>,
    classifier: Option<Dense>,
}

#[derive(Debug, Clone, PartialEq)]
struct CnnLayout {
    projection: Dense,
    convs: Vec<(usize, Dense)>,
    classifier: Dense,
}

#[derive(Debug, Clone, PartialEq)]
enum Body {
    Recurrent(RecurrentLayout),
    Cnn(CnnLayout),
}

#[derive(Debug, Clone, PartialEq)]
struct Layout {
    embedding: ParamId,
    body: Body,
}

fn build_layout(config: &ModelConfig, vocab_size: usize, params: &mut ParamSet, rng: &mut ChaCha8Rng) -> Layout {
    let mut init = Init { params, rng };
    let mut table = Tensor::xavier(vec![vocab_size, config.embedding_dim], init.rng);
    table.set_requires_grad(config.train_embeddings);
    let embedding = init.params.add("embedding", table);
    let k = config.num_classes;
    let p = config.embedding_dim;

    if config.family == Family::Cnn {
        let proj = config.cnn_projection;
        let projection = Dense::init(&mut init, "cnn.projection", p, proj, Activation::Identity);
        let convs = CNN_WIDTHS
            .iter()
            .map(|&w| {
                let d = Dense::init(&mut init, &format!("cnn.conv{w}"), w * proj, config.cnn_filters, Activation::Relu);
                (w, d)
            })
            .collect();
        let classifier = Dense::init(
            &mut init,
            "classifier",
            CNN_WIDTHS.len() * config.cnn_filters,
            k,
            Activation::Identity,
        );
        return Layout {
            embedding,
            body: Body::Cnn(CnnLayout {
                projection,
                convs,
                classifier,
            }),
        };
    }

    let h = config.rnn_width;
    let encoder = BiEncoder::init(&mut init, "word", p, config.rnn_layers, h);
    let mut g = Vec::with_capacity(config.g_layers);
    let mut width = 2 * h;
    for l in 0..config.g_layers {
        let last = l + 1 == config.g_layers;
        let out = if last && config.is_interpretable() { k } else { config.g_width };
        let act = if last { Activation::Sigmoid } else { Activation::Relu };
        g.push(Dense::init(&mut init, &format!("g{l}"), width, out, act));
        width = out;
    }
    let agg = config.aggregator().expect("recurrent family");
    let attention = (agg == Aggregator::Attention)
        .then(|| Attention::init(&mut init, "attention", width, config.attention_width));
    let mut phi_width = match agg {
        Aggregator::Concat => 2 * h,
        _ => width,
    };
    let (sentence_encoder, sentence_attention) = if config.is_hierarchical() {
        let sh = config.sentence_rnn_width;
        let enc = BiEncoder::init(&mut init, "sentence", phi_width, config.sentence_rnn_layers, sh);
        phi_width = 2 * sh;
        let att = (agg == Aggregator::Attention).then(|| {
            Attention::init(&mut init, "sentence_attention", phi_width, config.sentence_attention_width)
        });
        (Some(enc), att)
    } else {
        (None, None)
    };
    let classifier = (!config.is_interpretable())
        .then(|| Dense::init(&mut init, "classifier", phi_width, k, Activation::Identity));
    Layout {
        embedding,
        body: Body::Recurrent(RecurrentLayout {
            encoder,
            g,
            attention,
            sentence_encoder,
            sentence_attention,
            classifier,
        }),
    }
}

/// A neural classifier: configuration, vocabulary and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkRepr", into = "NetworkRepr")]
pub struct Network {
    config: ModelConfig,
    vocab: Vocabulary,
    params: ParamSet,
    layout: Layout,
}

#[derive(Serialize, Deserialize)]
struct NetworkRepr {
    config: ModelConfig,
    vocabulary: Vocabulary,
    params: ParamSet,
}

impl From<Network> for NetworkRepr {
    fn from(n: Network) -> Self {
        Self {
            config: n.config,
            vocabulary: n.vocab,
            params: n.params,
        }
    }
}

impl TryFrom<NetworkRepr> for Network {
    type Error = Error;

    fn try_from(r: NetworkRepr) -> Result<Self> {
        Network::from_parts(r.config, r.vocabulary, r.params)
    }
}

impl Network {
    /// Fresh model with Xavier-uniform matrices, zero biases and a seeded
    /// random embedding table.
    pub fn new(config: ModelConfig, vocab: Vocabulary, seed: u64) -> Result<Self> {
        config.validate()?;
        if vocab.is_empty() {
            return Err(Error::contract("vocabulary is empty"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = ParamSet::new();
        let layout = build_layout(&config, vocab.len(), &mut params, &mut rng);
        Ok(Self {
            config,
            vocab,
            params,
            layout,
        })
    }

    /// Like [`Network::new`], then copies pretrained rows for every
    /// vocabulary token present in `vectors`.
    pub fn with_vectors(config: ModelConfig, vocab: Vocabulary, vectors: &WordVectors, seed: u64) -> Result<Self> {
        if vectors.dim() != config.embedding_dim {
            return Err(Error::contract(format!(
                "vector file has dimension {}, model expects {}",
                vectors.dim(),
                config.embedding_dim
            )));
        }
        let mut net = Self::new(config, vocab, seed)?;
        let table = net.layout.embedding;
        for (i, tok) in net.vocab.tokens().to_vec().iter().enumerate() {
            if let Some(v) = vectors.get(tok) {
                net.params.get_mut(table).row_mut(i).copy_from_slice(v);
            }
        }
        Ok(net)
    }

    /// Rebuilds a model from stored parts, checking every tensor's name and shape.
    pub fn from_parts(config: ModelConfig, vocab: Vocabulary, params: ParamSet) -> Result<Self> {
        config.validate()?;
        let mut expected = ParamSet::new();
        let layout = build_layout(&config, vocab.len(), &mut expected, &mut ChaCha8Rng::seed_from_u64(0));
        if expected.len() != params.len() {
            return Err(Error::data(format!(
                "model holds {} tensors, configuration needs {}",
                params.len(),
                expected.len()
            )));
        }
        for ((en, et), (gn, gt)) in expected.iter().zip(params.iter()) {
            if en != gn || et.shape() != gt.shape() {
                return Err(Error::data(format!(
                    "tensor {gn} {:?} does not match expected {en} {:?}",
                    gt.shape(),
                    et.shape()
                )));
            }
        }
        if !params.all_finite() {
            return Err(Error::non_finite("stored model parameters"));
        }
        Ok(Self {
            config,
            vocab,
            params,
            layout,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamSet {
        &mut self.params
    }

    pub fn num_parameters(&self) -> usize {
        self.params.num_scalars()
    }

    /// Freezes or unfreezes the embedding table.
    pub fn set_embeddings_trainable(&mut self, on: bool) {
        self.config.train_embeddings = on;
        self.params.get_mut(self.layout.embedding).set_requires_grad(on);
    }

    pub fn embedding(&self) -> ParamId {
        self.layout.embedding
    }

    pub fn input(&self, doc: &Document) -> Result<Input> {
        if doc.is_empty() {
            return Err(Error::data("document has no tokens"));
        }
        Ok(Input {
            ids: self.vocab.encode(&doc.tokens),
            sentences: doc.sentence_ranges(),
        })
    }

    /// Records the forward pass of `input` on `tape`.
    ///
    /// Parameter values are read through the tape, so the same network can
    /// be evaluated against a perturbed copy of its parameters.
    pub fn forward(&self, tape: &mut Tape<'_>, input: &Input) -> Result<Forward> {
        let t = input.ids.len();
        if t == 0 {
            return Err(Error::data("document has no tokens"));
        }
        if let Some(&bad) = input.ids.iter().find(|&&i| i >= self.vocab.len()) {
            return Err(Error::contract(format!("token index {bad} outside the vocabulary")));
        }
        let emb: Vec<Var> = input
            .ids
            .iter()
            .map(|&i| tape.row(self.layout.embedding, i))
            .collect();
        match &self.layout.body {
            Body::Cnn(c) => Ok(self.forward_cnn(tape, c, emb)),
            Body::Recurrent(r) if self.config.is_hierarchical() => self.forward_hierarchical(tape, r, &emb, input),
            Body::Recurrent(r) => Ok(self.forward_flat(tape, r, &emb)),
        }
    }

    fn word_level(&self, tape: &mut Tape<'_>, r: &RecurrentLayout, emb: &[Var]) -> (Var, Vec<Var>) {
        let enc = r.encoder.bind(tape);
        let g: Vec<BoundDense> = r.g.iter().map(|d| d.bind(tape)).collect();
        let encoded = encode_bidirectional(tape, &enc, emb);
        let u: Vec<Var> = encoded.joint.iter().map(|&h| apply_stack(tape, &g, h)).collect();
        let phi = match self.config.aggregator().expect("recurrent family") {
            Aggregator::Concat => {
                let last = *encoded.forward.last().expect("non-empty sequence");
                tape.concat(&[last, encoded.reverse[0]])
            }
            Aggregator::Max => aggregate_max(tape, &u).0,
            Aggregator::Attention => {
                let att = r.attention.as_ref().expect("attention layout").bind(tape);
                aggregate_attention(tape, &att, &u).0
            }
        };
        (phi, u)
    }

    fn classify(&self, tape: &mut Tape<'_>, r: &RecurrentLayout, phi: Var) -> Var {
        let logits = match &r.classifier {
            Some(c) => c.bind(tape).apply(tape, phi),
            None => phi,
        };
        tape.softmax(logits)
    }

    fn forward_flat(&self, tape: &mut Tape<'_>, r: &RecurrentLayout, emb: &[Var]) -> Forward {
        let (phi, u) = self.word_level(tape, r, emb);
        let probs = self.classify(tape, r, phi);
        Forward { probs, phi, u }
    }

    fn forward_hierarchical(
        &self,
        tape: &mut Tape<'_>,
        r: &RecurrentLayout,
        emb: &[Var],
        input: &Input,
    ) -> Result<Forward> {
        if input.sentences.is_empty() {
            return Err(Error::data("hierarchical model needs at least one sentence"));
        }
        let mut phis = Vec::with_capacity(input.sentences.len());
        for s in &input.sentences {
            if s.is_empty() || s.end > emb.len() {
                return Err(Error::data(format!("bad sentence range {s:?} for {} tokens", emb.len())));
            }
            phis.push(self.word_level(tape, r, &emb[s.clone()]).0);
        }
        let enc = r.sentence_encoder.as_ref().expect("hierarchical layout").bind(tape);
        let h_bar = encode_bidirectional(tape, &enc, &phis).joint;
        let phi = match &r.sentence_attention {
            Some(a) => {
                let att = a.bind(tape);
                aggregate_attention(tape, &att, &h_bar).0
            }
            None => aggregate_max(tape, &h_bar).0,
        };
        let probs = self.classify(tape, r, phi);
        Ok(Forward {
            probs,
            phi,
            u: Vec::new(),
        })
    }

    fn forward_cnn(&self, tape: &mut Tape<'_>, c: &CnnLayout, mut emb: Vec<Var>) -> Forward {
        let min_len = *CNN_WIDTHS.iter().max().expect("non-empty widths");
        if emb.len() < min_len {
            let pad = tape.constant(vec![0.0; self.config.embedding_dim]);
            emb.resize(min_len, pad);
        }
        let proj = c.projection.bind(tape);
        let xs: Vec<Var> = emb.iter().map(|&e| proj.apply(tape, e)).collect();
        let mut pooled = Vec::with_capacity(c.convs.len());
        for (w, conv) in &c.convs {
            let conv = conv.bind(tape);
            let maps: Vec<Var> = xs
                .windows(*w)
                .map(|win| {
                    let x = tape.concat(win);
                    conv.apply(tape, x)
                })
                .collect();
            pooled.push(aggregate_max(tape, &maps).0);
        }
        let phi = tape.concat(&pooled);
        let logits = c.classifier.bind(tape).apply(tape, phi);
        let probs = tape.softmax(logits);
        Forward {
            probs,
            phi,
            u: Vec::new(),
        }
    }

    /// Cross-entropy of the true class.
    pub fn loss(&self, tape: &mut Tape<'_>, input: &Input, label: usize) -> Result<Var> {
        let f = self.forward(tape, input)?;
        tape.cross_entropy(f.probs, label)
    }

    pub fn predict(&self, input: &Input) -> Result<Prediction> {
        let mut tape = Tape::new(&self.params);
        let f = self.forward(&mut tape, input)?;
        let probs = tape.value(f.probs).to_vec();
        if probs.iter().any(|p| !p.is_finite()) {
            return Err(Error::non_finite("prediction"));
        }
        let importance = if self.config.is_interpretable() {
            let k = self.config.num_classes;
            let len = f.u.len();
            let mut values = vec![0.0; k * len];
            for (t, &u) in f.u.iter().enumerate() {
                for (j, &v) in tape.value(u).iter().enumerate() {
                    values[j * len + t] = v;
                }
            }
            Some(ImportanceMatrix::new(k, len, values)?)
        } else {
            None
        };
        Ok(Prediction { probs, importance })
    }

    pub fn predict_doc(&self, doc: &Document) -> Result<Prediction> {
        self.predict(&self.input(doc)?)
    }
}
