//! Classical cyclotron motion, its constants of motion, and the
//! Heisenberg-picture flow of the oscillator pair `(Q, P)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::physcore::{GaugeChoice, PhysicalParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl ClassicalState {
    pub fn new(x: f64, y: f64, vx: f64, vy: f64) -> Result<Self> {
        let s = Self { t: 0.0, x, y, vx, vy };
        if !s.is_finite() {
            return domain("classical state must be finite");
        }
        Ok(s)
    }

    pub fn is_finite(&self) -> bool {
        [self.t, self.x, self.y, self.vx, self.vy].iter().all(|v| v.is_finite())
    }

    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    fn phase_vector(&self) -> [f64; 4] {
        [self.x, self.y, self.vx, self.vy]
    }
}

/// `c1 = m vx + beta y`, `c2 = m vy - beta x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedPair {
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalMomenta {
    pub px: f64,
    pub py: f64,
}

/// Classical values of `Q, Qbar, P, Pbar` at a phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalVariables {
    pub q: f64,
    pub qbar: f64,
    pub p: f64,
    pub pbar: f64,
}

/// `(vx, vy, -omega_c vy, omega_c vx)`: the magnetic force `-(e/c) v x B`
/// with `B` along `+z`.
pub fn lorentz_rhs(params: &PhysicalParams, s: &ClassicalState) -> [f64; 4] {
    let w = params.omega_c();
    [s.vx, s.vy, -w * s.vy, w * s.vx]
}

/// Classical fourth-order Runge-Kutta with fixed step; returns `steps + 1`
/// states starting with `s0`. Times are `s0.t + k dt`.
pub fn integrate_orbit(
    params: &PhysicalParams,
    s0: ClassicalState,
    dt: f64,
    steps: usize,
) -> Result<Vec<ClassicalState>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return domain(format!("time step must be positive, got {dt}"));
    }
    if steps == 0 {
        return domain("at least one step is required");
    }
    if !s0.is_finite() {
        return domain("initial state must be finite");
    }
    let mut out = Vec::with_capacity(steps + 1);
    out.push(s0);
    let mut u = s0.phase_vector();
    let f = |u: &[f64; 4]| {
        lorentz_rhs(
            params,
            &ClassicalState {
                t: 0.0,
                x: u[0],
                y: u[1],
                vx: u[2],
                vy: u[3],
            },
        )
    };
    let shift = |u: &[f64; 4], k: &[f64; 4], h: f64| {
        [u[0] + h * k[0], u[1] + h * k[1], u[2] + h * k[2], u[3] + h * k[3]]
    };
    for step in 1..=steps {
        let k1 = f(&u);
        let k2 = f(&shift(&u, &k1, 0.5 * dt));
        let k3 = f(&shift(&u, &k2, 0.5 * dt));
        let k4 = f(&shift(&u, &k3, dt));
        for i in 0..4 {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.push(ClassicalState {
            t: s0.t + step as f64 * dt,
            x: u[0],
            y: u[1],
            vx: u[2],
            vy: u[3],
        });
    }
    Ok(out)
}

pub fn conserved_pair(params: &PhysicalParams, s: &ClassicalState) -> ConservedPair {
    let (m, b) = (params.mass(), params.beta());
    ConservedPair {
        c1: m * s.vx + b * s.y,
        c2: m * s.vy - b * s.x,
    }
}

/// LandauX: `(m vx + beta y, m vy)`. LandauY, with vector potential along
/// y: `(m vx, m vy - beta x)`.
pub fn canonical_momenta(params: &PhysicalParams, gauge: GaugeChoice, s: &ClassicalState) -> CanonicalMomenta {
    let (m, b) = (params.mass(), params.beta());
    match gauge {
        GaugeChoice::LandauX => CanonicalMomenta {
            px: m * s.vx + b * s.y,
            py: m * s.vy,
        },
        GaugeChoice::LandauY => CanonicalMomenta {
            px: m * s.vx,
            py: m * s.vy - b * s.x,
        },
    }
}

/// The classical counterparts of the operator definitions, built from
/// [`canonical_momenta`].
pub fn canonical_variables(params: &PhysicalParams, gauge: GaugeChoice, s: &ClassicalState) -> CanonicalVariables {
    let b = params.beta();
    let CanonicalMomenta { px, py } = canonical_momenta(params, gauge, s);
    match gauge {
        GaugeChoice::LandauX => CanonicalVariables {
            q: -(px - b * s.y) / b,
            qbar: -(py - b * s.x) / b,
            p: py,
            pbar: px,
        },
        GaugeChoice::LandauY => CanonicalVariables {
            q: -(py + b * s.x) / b,
            qbar: (px + b * s.y) / b,
            p: -px,
            pbar: py,
        },
    }
}

/// `(x - vy/omega_c, y + vx/omega_c)`, the centre of the circular orbit.
pub fn guiding_center(params: &PhysicalParams, s: &ClassicalState) -> (f64, f64) {
    let w = params.omega_c();
    (s.x - s.vy / w, s.y + s.vx / w)
}

/// `(Q(t), P(t))` under `H = beta^2 Q^2 / 2m + P^2 / 2m`, which gives
/// `dQ/dt = P/m` and `dP/dt = -beta^2 Q / m`. `Qbar` and `Pbar` do not
/// move.
pub fn heisenberg_flow(params: &PhysicalParams, q0: f64, p0: f64, t: f64) -> (f64, f64) {
    let b = params.beta();
    let (s, c) = (params.omega_c() * t).sin_cos();
    (q0 * c + p0 / b * s, p0 * c - b * q0 * s)
}

/// `beta^2 Q^2 / 2m + P^2 / 2m`.
pub fn oscillator_energy(params: &PhysicalParams, q: f64, p: f64) -> f64 {
    let (m, b) = (params.mass(), params.beta());
    (b * b * q * q + p * p) / (2.0 * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn natural() -> PhysicalParams {
        PhysicalParams::natural()
    }

    fn unit_circle() -> ClassicalState {
        ClassicalState::new(1.0, 0.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn rhs_examples() {
        let p = natural();
        assert_eq!(lorentz_rhs(&p, &unit_circle()), [0.0, 1.0, -1.0, 0.0]);
        let rest = ClassicalState::new(3.0, -2.0, 0.0, 0.0).unwrap();
        assert_eq!(&lorentz_rhs(&p, &rest)[2..], &[0.0, 0.0]);
        let q = p.with_field(2.5).unwrap();
        let a = ClassicalState::new(0.0, 0.0, 1.0, 2.0).unwrap();
        let b = ClassicalState::new(0.0, 0.0, 3.0, 6.0).unwrap();
        let (ra, rb) = (lorentz_rhs(&q, &a), lorentz_rhs(&q, &b));
        for i in 0..4 {
            assert!((3.0 * ra[i] - rb[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn one_period_returns_to_start() {
        let p = natural();
        let t = p.cyclotron_period();
        let orbit = integrate_orbit(&p, unit_circle(), t / 1000.0, 1000).unwrap();
        assert_eq!(orbit.len(), 1001);
        let end = orbit.last().unwrap();
        assert!((end.t - t).abs() < 1e-12);
        let s0 = unit_circle();
        for (a, b) in end.phase_vector().iter().zip(s0.phase_vector()) {
            assert!((a - b).abs() < 1e-8, "{end:?}");
        }
        // Closed form: x = cos t, y = sin t.
        for s in orbit.iter().step_by(97) {
            assert!((s.x - s.t.cos()).abs() < 1e-9);
            assert!((s.y - s.t.sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn speed_and_constants_are_conserved() {
        let p = PhysicalParams::new(1.0, 2.0, 1.0, 1.0, 3.0).unwrap();
        let s0 = ClassicalState::new(0.4, -1.0, 0.7, -0.2).unwrap();
        let t = p.cyclotron_period();
        let orbit = integrate_orbit(&p, s0, t / 1000.0, 10_000).unwrap();
        let v0 = s0.speed();
        let c0 = conserved_pair(&p, &s0);
        let g0 = guiding_center(&p, &s0);
        let scale = p.mass() * v0;
        for s in &orbit {
            assert!((s.speed() - v0).abs() / v0 < 1e-10);
            let c = conserved_pair(&p, s);
            assert!((c.c1 - c0.c1).abs() / scale < 1e-9);
            assert!((c.c2 - c0.c2).abs() / scale < 1e-9);
            let g = guiding_center(&p, s);
            assert!((g.0 - g0.0).abs() < 1e-8 && (g.1 - g0.1).abs() < 1e-8);
        }
    }

    #[test]
    fn doubling_field_halves_radius() {
        let p = natural();
        let radius = |p: &PhysicalParams| {
            let s0 = unit_circle();
            let orbit = integrate_orbit(p, s0, p.cyclotron_period() / 1000.0, 1000).unwrap();
            let g = guiding_center(p, &s0);
            orbit.iter().map(|s| (s.x - g.0).hypot(s.y - g.1)).fold(0.0f64, f64::max)
        };
        let r1 = radius(&p);
        let r2 = radius(&p.with_field(2.0).unwrap());
        assert!((r1 - 1.0).abs() < 1e-9);
        assert!((r2 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn conserved_pair_examples() {
        let p = natural();
        let c = conserved_pair(&p, &unit_circle());
        assert_eq!((c.c1, c.c2), (0.0, 0.0));
        let rest = ClassicalState::new(0.0, 0.0, 0.0, 0.0).unwrap();
        let c = conserved_pair(&p, &rest);
        assert_eq!((c.c1, c.c2), (0.0, 0.0));
    }

    #[test]
    fn canonical_momenta_identification() {
        let p = natural();
        let s0 = ClassicalState::new(0.3, 0.1, -0.5, 0.8).unwrap();
        let orbit = integrate_orbit(&p, s0, p.cyclotron_period() / 1000.0, 2000).unwrap();
        let py: Vec<f64> = orbit
            .iter()
            .map(|s| {
                let m = canonical_momenta(&p, GaugeChoice::LandauX, s);
                let c = conserved_pair(&p, s);
                assert_eq!(m.px.to_bits(), c.c1.to_bits());
                m.py
            })
            .collect();
        let spread = py.iter().cloned().fold(f64::MIN, f64::max) - py.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread > 1.0);
        let first = canonical_momenta(&p, GaugeChoice::LandauX, &s0).py - p.beta() * s0.x;
        for s in &orbit {
            let d = canonical_momenta(&p, GaugeChoice::LandauX, s).py - p.beta() * s.x;
            assert!((d - first).abs() < 1e-9);
        }
        for s in &orbit {
            let m = canonical_momenta(&p, GaugeChoice::LandauY, s);
            assert_eq!(m.py.to_bits(), conserved_pair(&p, s).c2.to_bits());
        }
    }

    #[test]
    fn classical_shadow_of_canonical_variables() {
        let p = PhysicalParams::new(1.0, 1.5, 1.0, 1.0, 2.0).unwrap();
        let s0 = ClassicalState::new(0.3, 0.1, -0.5, 0.8).unwrap();
        let orbit = integrate_orbit(&p, s0, p.cyclotron_period() / 2000.0, 3000).unwrap();
        for gauge in [GaugeChoice::LandauX, GaugeChoice::LandauY] {
            let v0 = canonical_variables(&p, gauge, &s0);
            for s in orbit.iter().step_by(111) {
                let v = canonical_variables(&p, gauge, s);
                // Qbar, Pbar constant; (Q, P) follow the oscillator flow.
                assert!((v.qbar - v0.qbar).abs() < 1e-9);
                assert!((v.pbar - v0.pbar).abs() < 1e-9);
                let (q, pp) = heisenberg_flow(&p, v0.q, v0.p, s.t);
                assert!((v.q - q).abs() < 1e-9, "{gauge:?}");
                assert!((v.p - pp).abs() < 1e-9, "{gauge:?}");
            }
            let m = canonical_momenta(&p, gauge, &s0);
            if gauge == GaugeChoice::LandauX {
                assert!((m.py - p.beta() * s0.x + p.beta() * v0.qbar).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn heisenberg_examples() {
        let p = PhysicalParams::new(1.0, 2.0, 1.0, 1.0, 3.0).unwrap();
        assert_eq!(heisenberg_flow(&p, 0.7, -0.2, 0.0), (0.7, -0.2));
        let (q, pp) = heisenberg_flow(&p, 0.7, -0.2, p.cyclotron_period());
        assert!((q - 0.7).abs() < 1e-14 && (pp + 0.2).abs() < 1e-14);
        let e0 = oscillator_energy(&p, 0.7, -0.2);
        for k in 0..50 {
            let (q, pp) = heisenberg_flow(&p, 0.7, -0.2, 0.37 * k as f64);
            assert!((oscillator_energy(&p, q, pp) - e0).abs() / e0 < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = natural();
        assert!(integrate_orbit(&p, unit_circle(), 0.0, 10).is_err());
        assert!(integrate_orbit(&p, unit_circle(), 0.1, 0).is_err());
        assert!(ClassicalState::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn heisenberg_flow_satisfies_equations_of_motion(
            q0 in -3.0f64..3.0, p0 in -3.0f64..3.0, t in 0.0f64..20.0, field in 0.5f64..3.0,
        ) {
            let p = PhysicalParams::new(1.0, 1.3, 1.0, 1.0, field).unwrap();
            let h = 1e-4;
            let (qp, pp) = heisenberg_flow(&p, q0, p0, t + h);
            let (qm, pm) = heisenberg_flow(&p, q0, p0, t - h);
            let (q, pv) = heisenberg_flow(&p, q0, p0, t);
            let dq = (qp - qm) / (2.0 * h);
            let dp = (pp - pm) / (2.0 * h);
            let m = p.mass();
            let b = p.beta();
            let scale = (b * q0).hypot(p0).max(1e-3) / m;
            prop_assert!((dq - pv / m).abs() / scale < 1e-6);
            prop_assert!((dp + b * b * q / m).abs() / (scale * b) < 1e-6);
        }
    }
}
