use std::time::Instant;

use serde::Serialize;

use super::{OnlineLearner, RoundLoss};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GameOptions {
    pub batch_size: usize,
    /// Keep every iterate and every applied gradient.
    pub record_history: bool,
    /// Measure wall time per update. Timings make traces nondeterministic.
    pub timing: bool,
}

impl Default for GameOptions {
    fn default() -> Self {
        Self {
            batch_size: 1,
            record_history: false,
            timing: false,
        }
    }
}

/// One update of the game.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    /// 1-based update index.
    pub round: usize,
    pub batch_len: usize,
    /// Mean batch loss at the played iterate.
    pub loss: f64,
    /// `loss + phi(x_t)`.
    pub composite: f64,
    /// Mistakes in the batch (classification losses only).
    pub mistakes: usize,
    pub cum_composite: f64,
    pub cum_mistakes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ns: Option<u64>,
}

#[derive(Clone, Debug, Default)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
    /// `x_1, ..., x_{U+1}` when history is recorded.
    pub iterates: Vec<Vec<f64>>,
    /// The averaged gradient applied at each update when history is recorded.
    pub gradients: Vec<Vec<f64>>,
    pub final_x: Vec<f64>,
    pub batch_size: usize,
    /// Examples that carried a classification label.
    pub labeled: usize,
}

impl RunTrace {
    pub fn updates(&self) -> usize {
        self.rows.len()
    }

    pub fn total_mistakes(&self) -> usize {
        self.rows.last().map_or(0, |r| r.cum_mistakes)
    }

    /// Fraction of labeled examples misclassified by the iterate current when they arrived.
    pub fn online_error(&self) -> f64 {
        if self.labeled == 0 {
            f64::NAN
        } else {
            self.total_mistakes() as f64 / self.labeled as f64
        }
    }

    pub fn cumulative_composite(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.cum_composite)
    }
}

/// Plays the stream in consecutive mini-batches, one learner update per batch.
///
/// Each batch is charged `f(x_t) + phi(x_t)` with `f` the mean batch loss; the
/// learner then receives the mean batch subgradient.
pub fn run_game<A, L>(learner: &mut A, stream: &[L], opts: GameOptions) -> Result<RunTrace>
where
    A: OnlineLearner + ?Sized,
    L: RoundLoss,
{
    if opts.batch_size == 0 {
        return Err(Error::InvalidParameter("batch size must be at least 1".into()));
    }
    let n = learner.dim();
    if let Some(bad) = stream.iter().find(|f| f.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.dim(),
        });
    }
    let phi = learner.composite();
    let mut trace = RunTrace {
        batch_size: opts.batch_size,
        ..RunTrace::default()
    };
    let (mut cum_composite, mut cum_mistakes) = (0.0, 0);
    for (u, batch) in stream.chunks(opts.batch_size).enumerate() {
        let round = u + 1;
        let x = learner.iterate().to_vec();
        if opts.record_history {
            trace.iterates.push(x.clone());
        }
        let w = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        let mut mistakes = 0;
        let mut g = vec![0.0; n];
        for f in batch {
            loss += w * f.value(&x);
            f.add_gradient(&x, w, &mut g);
            if let Some(z) = f.zero_one(&x) {
                trace.labeled += 1;
                mistakes += z as usize;
            }
        }
        if !loss.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Aborted {
                round,
                msg: format!("non-finite loss or gradient (loss = {loss})"),
            });
        }
        let composite = loss + phi.value(&x);
        let start = opts.timing.then(Instant::now);
        learner.step(&g).map_err(|e| Error::Aborted {
            round,
            msg: e.to_string(),
        })?;
        let wall_ns = start.map(|s| s.elapsed().as_nanos() as u64);
        cum_composite += composite;
        cum_mistakes += mistakes;
        trace.rows.push(TraceRow {
            round,
            batch_len: batch.len(),
            loss,
            composite,
            mistakes,
            cum_composite,
            cum_mistakes,
            wall_ns,
        });
        if opts.record_history {
            trace.gradients.push(g);
        }
    }
    trace.final_x = learner.iterate().to_vec();
    if opts.record_history {
        trace.iterates.push(trace.final_x.clone());
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::Ogd;
    use crate::composite::Composite;
    use crate::learner::Quadratic;

    #[test]
    fn update_count_is_ceiling() {
        let stream: Vec<Quadratic> = (0..10).map(|i| Quadratic::new(vec![i as f64, 1.0], 1.0)).collect();
        for b in [1, 3, 4, 10, 11] {
            let mut ogd = Ogd::new(2, 0.1, Composite::none());
            let opts = GameOptions {
                batch_size: b,
                ..GameOptions::default()
            };
            let t = run_game(&mut ogd, &stream, opts).unwrap();
            assert_eq!(t.updates(), 10usize.div_ceil(b));
        }
    }

    #[test]
    fn zero_gradients_keep_iterate() {
        let stream = vec![Quadratic::new(vec![0.0; 3], 0.0); 7];
        let mut ogd = Ogd::new(3, 1.0, Composite::none());
        let opts = GameOptions {
            record_history: true,
            ..GameOptions::default()
        };
        let t = run_game(&mut ogd, &stream, opts).unwrap();
        assert!(t.iterates.iter().all(|x| x == &vec![0.0; 3]));
        assert_eq!(t.iterates.len(), 8);
    }

    #[test]
    fn cumulative_columns_are_prefix_sums() {
        let stream: Vec<Quadratic> = (0..6).map(|i| Quadratic::new(vec![i as f64], 1.0)).collect();
        let mut ogd = Ogd::new(1, 0.5, Composite::none());
        let t = run_game(&mut ogd, &stream, GameOptions::default()).unwrap();
        let mut acc = 0.0;
        for r in &t.rows {
            acc += r.composite;
            assert_eq!(r.cum_composite, acc);
        }
    }

    #[test]
    fn rejects_zero_batch() {
        let mut ogd = Ogd::new(1, 0.5, Composite::none());
        let opts = GameOptions {
            batch_size: 0,
            ..GameOptions::default()
        };
        assert!(run_game(&mut ogd, &[Quadratic::new(vec![0.0], 1.0)], opts).is_err());
    }
}
