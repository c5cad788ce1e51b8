//! Linear-span protocol check: every iterate must lie in the span of the
//! earlier iterates and oracle outputs, block by block. Projections onto the
//! centered balls only rescale, so they never leave that span.

use serde::Serialize;

use super::Trace;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::oracle::PifoResponse;

#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    Query(PifoResponse),
    Iterate { x: Vec<f64>, y: Vec<f64> },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProtocolLog {
    events: Vec<Event>,
}

impl ProtocolLog {
    /// Starts a log at the initial point.
    pub fn new(x0: &[f64], y0: &[f64]) -> Self {
        ProtocolLog { events: vec![Event::Iterate { x: x0.to_vec(), y: y0.to_vec() }] }
    }

    pub fn push(&mut self, e: Event) {
        self.events.push(e);
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    /// Position of the offending iterate among all iterates (0 = start).
    pub step: usize,
    pub block: char,
    pub residual: f64,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub iterates: usize,
    pub queries: usize,
    /// Largest residual relative to the iterate norm.
    pub worst_relative: f64,
    pub violation: Option<Violation>,
}

impl AuditReport {
    pub fn pass(&self) -> bool {
        self.violation.is_none()
    }
}

/// Incrementally orthonormalized span.
#[derive(Default)]
struct Span {
    basis: Vec<Vec<f64>>,
}

impl Span {
    fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut r = v.to_vec();
        // two passes keep the basis orthogonal to working precision
        for _ in 0..2 {
            for q in &self.basis {
                let c = dot(q, &r);
                r.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        r
    }

    fn add(&mut self, v: &[f64]) {
        let scale = norm(v);
        if scale == 0.0 || self.basis.len() == v.len() {
            return;
        }
        let r = self.residual(v);
        let rn = norm(&r);
        if rn > 1e-12 * scale {
            self.basis.push(r.into_iter().map(|a| a / rn).collect());
        }
    }
}

/// Checks every logged iterate against the span of what came before it.
/// A relative residual above `1e-8` is a violation.
pub fn protocol_audit(trace: &Trace) -> Result<AuditReport> {
    let log = trace
        .log
        .as_ref()
        .ok_or_else(|| Error::Unsupported("trace was recorded without a protocol log".into()))?;
    Ok(audit_log(log))
}

pub fn audit_log(log: &ProtocolLog) -> AuditReport {
    let mut sx = Span::default();
    let mut sy = Span::default();
    let mut report = AuditReport { iterates: 0, queries: 0, worst_relative: 0.0, violation: None };
    for e in log.events() {
        match e {
            Event::Query(r) => {
                report.queries += 1;
                sx.add(&r.grad_x);
                sy.add(&r.grad_y);
                if let Some(u) = &r.prox_x {
                    sx.add(u);
                }
                if let Some(v) = &r.prox_y {
                    sy.add(v);
                }
                sx.add(&r.proj_x);
                sy.add(&r.proj_y);
            }
            Event::Iterate { x, y } => {
                // the starting point is given, not derived
                if report.iterates > 0 {
                    for (block, v, span) in [('x', x, &sx), ('y', y, &sy)] {
                        let nv = norm(v);
                        let res = norm(&span.residual(v));
                        let rel = if nv > 0.0 { res / nv } else { 0.0 };
                        report.worst_relative = report.worst_relative.max(rel);
                        if rel > 1e-8 && report.violation.is_none() {
                            report.violation = Some(Violation { step: report.iterates, block, residual: res, norm: nv });
                        }
                    }
                }
                sx.add(x);
                sy.add(y);
                report.iterates += 1;
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{run_sgda, Algorithm, AlgorithmSpec, StopRule};
    use crate::geo::trial_rng;
    use crate::minimax::make_tilde_r;

    fn recorded(queries: u64) -> StopRule {
        let mut s = StopRule::queries(queries);
        s.record = true;
        s
    }

    #[test]
    fn compliant_run_passes() {
        let inst = make_tilde_r(8, 1.0, (0.5, 0.5), 2).unwrap();
        let t = run_sgda(&inst, &AlgorithmSpec::new(Algorithm::Sgda), &recorded(40), &mut trial_rng(0, 0)).unwrap();
        let r = protocol_audit(&t).unwrap();
        assert!(r.pass(), "{r:?}");
        assert_eq!(r.queries, 40);
        assert_eq!(r.iterates, 41);
    }

    #[test]
    fn injected_coordinate_is_caught_at_its_step() {
        let inst = make_tilde_r(8, 1.0, (0.5, 0.5), 2).unwrap();
        let t = run_sgda(&inst, &AlgorithmSpec::new(Algorithm::Sgda), &recorded(6), &mut trial_rng(0, 0)).unwrap();
        let mut log = t.log.unwrap();
        let depth = crate::zero_chain::ChainCase::Tilde.depth_of(&t.x, &t.y);
        let mut x = t.x.clone();
        x[depth + 1] = 1.0;
        log.push(Event::Iterate { x, y: t.y.clone() });
        let r = audit_log(&log);
        let v = r.violation.expect("violation");
        assert_eq!((v.step, v.block), (7, 'x'));
    }

    #[test]
    fn rescaled_iterates_are_allowed() {
        let mut log = ProtocolLog::new(&[0.0, 0.0], &[]);
        let r = PifoResponse {
            index: 0,
            value: 0.0,
            grad_x: vec![3.0, 4.0],
            grad_y: vec![],
            prox_x: None,
            prox_y: None,
            proj_x: vec![0.0, 0.0],
            proj_y: vec![],
        };
        log.push(Event::Query(r));
        log.push(Event::Iterate { x: vec![0.6, 0.8], y: vec![] });
        assert!(audit_log(&log).pass());
        log.push(Event::Iterate { x: vec![0.0, 1.0], y: vec![] });
        assert!(!audit_log(&log).pass());
    }
}
