//! The proximal incremental first-order oracle and its query ledger.

use serde::Serialize;

use crate::error::Result;
use crate::instance::Instance;
use crate::prox::prox;

/// Everything one query returns. The prox fields are present only when a
/// prox weight was supplied.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PifoResponse {
    pub index: usize,
    pub value: f64,
    pub grad_x: Vec<f64>,
    pub grad_y: Vec<f64>,
    pub prox_x: Option<Vec<f64>>,
    pub prox_y: Option<Vec<f64>>,
    pub proj_x: Vec<f64>,
    pub proj_y: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QueryCounter {
    total: u64,
    per_component: Vec<u64>,
}

impl QueryCounter {
    pub fn new(n: usize) -> Self {
        QueryCounter { total: 0, per_component: vec![0; n] }
    }

    pub fn record(&mut self, i: usize) {
        self.total += 1;
        self.per_component[i] += 1;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn per_component(&self) -> &[u64] {
        &self.per_component
    }
}

/// Queries exposed component `i` at `(x, y)`. Failed queries are not counted.
pub fn pifo(
    inst: &Instance,
    i: usize,
    x: &[f64],
    y: &[f64],
    gamma: Option<f64>,
    counter: &mut QueryCounter,
) -> Result<PifoResponse> {
    let eval = inst.component(i, x, y)?;
    let (prox_x, prox_y) = match gamma {
        Some(g) => {
            let (u, v) = prox(inst, i, x, y, g)?;
            (Some(u), Some(v))
        }
        None => (None, None),
    };
    counter.record(i);
    Ok(PifoResponse {
        index: i,
        value: eval.value,
        grad_x: eval.grad_x,
        grad_y: eval.grad_y,
        prox_x,
        prox_y,
        proj_x: inst.project_x(x),
        proj_y: inst.project_y(y),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimax::{make_scsc, make_tilde_r};

    #[test]
    fn non_activating_component_at_origin_is_silent() {
        let inst = make_tilde_r(6, 1.0, (0.5, 0.5), 3).unwrap();
        let mut counter = QueryCounter::new(3);
        for i in 1..3 {
            let r = pifo(&inst, i, &[0.0; 6], &[0.0; 6], Some(0.3), &mut counter).unwrap();
            assert_eq!(r.value, 0.0);
            assert!(r.grad_x.iter().chain(&r.grad_y).all(|&v| v == 0.0));
            assert!(r.prox_x.unwrap().iter().chain(&r.prox_y.unwrap()).all(|&v| v == 0.0));
            assert!(r.proj_x.iter().chain(&r.proj_y).all(|&v| v == 0.0));
        }
        assert_eq!(counter.total(), 2);
    }

    #[test]
    fn projection_scales_onto_ball() {
        let inst = make_scsc(16.0, 1.0, 1.0, 1.0, 1.0, 4, 2).unwrap();
        let mut counter = QueryCounter::new(4);
        let r = pifo(&inst, 0, &[3.0, 4.0], &[0.0, 0.0], None, &mut counter).unwrap();
        let norm = crate::linalg::norm(&r.proj_x);
        assert!((norm - 1.0).abs() < 1e-15);
        assert!(r.prox_x.is_none());
    }

    #[test]
    fn counter_tracks_every_call() {
        let inst = make_tilde_r(4, 1.0, (0.0, 0.0), 2).unwrap();
        let mut counter = QueryCounter::new(2);
        for k in 0..7 {
            pifo(&inst, k % 2, &[0.0; 4], &[0.0; 4], None, &mut counter).unwrap();
        }
        assert_eq!(counter.total(), 7);
        assert_eq!(counter.per_component().iter().sum::<u64>(), 7);
        assert!(pifo(&inst, 5, &[0.0; 4], &[0.0; 4], None, &mut counter).is_err());
        assert_eq!(counter.total(), 7);
    }
}
