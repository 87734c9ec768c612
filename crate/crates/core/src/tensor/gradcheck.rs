use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Gradients, ParamSet, Tape, Var};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    /// Largest `|analytic - numeric| / max(1, |analytic|, |numeric|)` seen.
    pub max_rel_error: f64,
    pub coords_checked: usize,
    /// Parameter name and flat index of the worst coordinate.
    pub worst: Option<(String, usize)>,
}

/// Compares tape gradients against central differences.
///
/// `build` records a scalar loss on the tape it is given and must be
/// deterministic. At most `max_per_tensor` coordinates are sampled from each
/// trainable tensor.
pub fn gradient_check<F>(
    params: &ParamSet,
    eps: f64,
    max_per_tensor: usize,
    seed: u64,
    build: F,
) -> Result<GradCheckReport>
where
    F: Fn(&mut Tape<'_>) -> Result<Var>,
{
    let eval = |ps: &ParamSet| -> Result<f64> {
        let mut tape = Tape::new(ps);
        let l = build(&mut tape)?;
        let v = tape.scalar(l);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::non_finite(format!("loss during gradient check ({v})")))
        }
    };

    let mut grads = Gradients::zeros_like(params);
    {
        let mut tape = Tape::new(params);
        let l = build(&mut tape)?;
        tape.backward(l, &mut grads)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut work = params.clone();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        coords_checked: 0,
        worst: None,
    };
    for id in params.ids() {
        let t = params.get(id);
        if !t.requires_grad() || t.is_empty() {
            continue;
        }
        let n = t.len();
        let coords: Vec<usize> = if n <= max_per_tensor {
            (0..n).collect()
        } else {
            let mut c = sample(&mut rng, n, max_per_tensor).into_vec();
            c.sort_unstable();
            c
        };
        for i in coords {
            let orig = t.data()[i];
            work.get_mut(id).data_mut()[i] = orig + eps;
            let up = eval(&work)?;
            work.get_mut(id).data_mut()[i] = orig - eps;
            let down = eval(&work)?;
            work.get_mut(id).data_mut()[i] = orig;

            let numeric = (up - down) / (2.0 * eps);
            let analytic = grads.get(id)[i];
            let rel = (analytic - numeric).abs() / 1f64.max(analytic.abs()).max(numeric.abs());
            report.coords_checked += 1;
            if rel > report.max_rel_error || report.worst.is_none() {
                report.max_rel_error = rel;
                report.worst = Some((params.name(id).to_string(), i));
            }
        }
    }
    Ok(report)
}
