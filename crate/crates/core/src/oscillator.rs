//! Spring-mass model of a vibrating surface pixel.
//!
//! A mass hangs from a spring of length `L` at maximum tension and rest
//! length `L0` with elastic constant `xi`. The exact restoring force is
//!
//! ```text
//! F(r) = -4 xi r (1 - L0 / sqrt(L^2 + 4 r^2))
//! ```
//!
//! and for `|r| << L` it reduces to the cubic form
//!
//! ```text
//! F(r) ~ -4 xi (L - L0) (r/L) [1 + 2 L0 / (L - L0) (r/L)^2]
//! ```
//!
//! Dividing by the mass gives `r'' + w0^2 (1 + xi_nl r^2) r = 0` with
//! `w0^2 = (4 xi / m)(L - L0)/L` and `xi_nl = 2 L0 / (L^2 (L - L0))`. The
//! damped and forced version adds `damping * r'` on the left and an
//! arbitrary forcing acceleration on the right. For small nonlinearity the
//! motion is the two-degree-of-freedom harmonic ellipse
//! `(a cos w0 t, b sin w0 t) exp(-damping t / 2)`.

use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    /// Spring length at maximum tension `L`, meters.
    pub spring_length: f64,
    /// Rest length `L0`, meters.
    pub rest_length: f64,
    /// Elastic constant `xi`, N/m.
    pub elastic_constant: f64,
    /// Mass, kg.
    pub mass: f64,
    /// Damping coefficient, 1/s.
    pub damping: f64,
    /// Range-axis shift amplitude `a`, samples.
    pub shift_a: f64,
    /// Azimuth-axis shift amplitude `b`, samples.
    pub shift_b: f64,
}

impl OscillatorParams {
    /// Parameters whose natural frequency is `omega0` (unit mass, unit
    /// spring length, zero rest length, so the motion is linear).
    pub fn linear_with_frequency(omega0: f64, shift_a: f64, shift_b: f64, damping: f64) -> Self {
        Self {
            spring_length: 1.0,
            rest_length: 0.0,
            elastic_constant: omega0 * omega0 / 4.0,
            mass: 1.0,
            damping,
            shift_a,
            shift_b,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.spring_length,
            self.rest_length,
            self.elastic_constant,
            self.mass,
            self.damping,
            self.shift_a,
            self.shift_b,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidArgument(format!(
                "oscillator parameters must be finite: {self:?}"
            )));
        }
        if self.spring_length <= 0.0
            || self.rest_length < 0.0
            || self.rest_length > self.spring_length
            || self.mass <= 0.0
            || self.damping < 0.0
            || self.elastic_constant < 0.0
        {
            return Err(Error::InvalidArgument(format!(
                "oscillator parameters violate L > 0, 0 <= L0 <= L, m > 0, damping >= 0, xi >= 0: {self:?}"
            )));
        }
        Ok(())
    }

    /// Exact restoring force along one axis.
    pub fn restoring_force(&self, r: f64) -> f64 {
        let l = self.spring_length;
        -4.0 * self.elastic_constant * r * (1.0 - self.rest_length / (l * l + 4.0 * r * r).sqrt())
    }

    /// Exact restoring force for a planar displacement; the spring
    /// extension depends on `|r|`.
    pub fn restoring_force_vec(&self, r: [f64; 2]) -> [f64; 2] {
        let l = self.spring_length;
        let n2 = r[0] * r[0] + r[1] * r[1];
        let k = -4.0 * self.elastic_constant * (1.0 - self.rest_length / (l * l + 4.0 * n2).sqrt());
        [k * r[0], k * r[1]]
    }

    /// Cubic approximation to [`restoring_force`](Self::restoring_force),
    /// valid for `|r| << L`.
    ///
    /// Written as `-4 xi (r/L) [(L - L0) + 2 L0 (r/L)^2]`, which has no
    /// singularity at `L = L0`; there the linear term vanishes, the force
    /// reduces to `-8 xi L0 (r/L)^3` and `limiting` is set.
    pub fn cubic_force(&self, r: f64) -> CubicForce {
        let l = self.spring_length;
        let l0 = self.rest_length;
        let u = r / l;
        CubicForce {
            force: -4.0 * self.elastic_constant * u * ((l - l0) + 2.0 * l0 * u * u),
            limiting: l == l0,
        }
    }

    /// `w0^2 = (4 xi / m)(L - L0)/L`; zero when `L = L0`.
    pub fn omega0_squared(&self) -> f64 {
        let l = self.spring_length;
        4.0 * self.elastic_constant / self.mass * (l - self.rest_length) / l
    }

    /// Natural angular frequency, the square root of
    /// [`omega0_squared`](Self::omega0_squared).
    pub fn natural_frequency(&self) -> Result<f64> {
        self.validate()?;
        if self.spring_length <= self.rest_length {
            return Err(Error::InvalidArgument(format!(
                "natural frequency needs spring_length > rest_length, got L = {}, L0 = {}",
                self.spring_length, self.rest_length
            )));
        }
        Ok(self.omega0_squared().sqrt())
    }

    /// Nonlinearity coefficient `xi_nl = 2 L0 / (L^2 (L - L0))`, units 1/m^2.
    pub fn xi_nonlinear(&self) -> Result<f64> {
        self.natural_frequency()?;
        let l = self.spring_length;
        let l0 = self.rest_length;
        Ok(2.0 * l0 / (l * l * (l - l0)))
    }

    /// Coefficient of the cubic acceleration term, `w0^2 xi_nl =
    /// 8 xi L0 / (m L^3)`. Finite for every valid parameter set.
    pub fn cubic_rate(&self) -> f64 {
        let l = self.spring_length;
        8.0 * self.elastic_constant * self.rest_length / (self.mass * l * l * l)
    }

    /// Closed-form two-degree-of-freedom motion at time `t`.
    pub fn closed_form(&self, omega0: f64, t: f64) -> [f64; 2] {
        let env = (-self.damping * t / 2.0).exp();
        let (s, c) = (omega0 * t).sin_cos();
        [self.shift_a * c * env, self.shift_b * s * env]
    }

    /// Initial state matching [`closed_form`](Self::closed_form) at `t = 0`.
    pub fn closed_form_initial_state(&self, omega0: f64) -> State {
        State {
            position: [self.shift_a, 0.0],
            velocity: [-self.damping / 2.0 * self.shift_a, self.shift_b * omega0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicForce {
    pub force: f64,
    /// Set when `L = L0` and only the cubic term survives.
    pub limiting: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub position: [f64; 2],
    pub velocity: [f64; 2],
}

impl State {
    fn is_finite(&self) -> bool {
        self.position.iter().chain(&self.velocity).all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nonlinearity {
    Included,
    Neglected,
}

/// Sampled trajectory of an integration run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    omega0_sq: f64,
    cubic: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn positions(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.states.iter().map(|s| s.position)
    }

    /// Mechanical energy per unit mass of sample `i`, including the quartic
    /// potential when the run kept the nonlinearity.
    pub fn energy(&self, i: usize) -> f64 {
        let s = &self.states[i];
        let v2 = s.velocity[0].powi(2) + s.velocity[1].powi(2);
        let r2 = s.position[0].powi(2) + s.position[1].powi(2);
        0.5 * v2 + 0.5 * self.omega0_sq * r2 + 0.25 * self.cubic * r2 * r2
    }

    /// Writes `t,r_x,r_y` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,r_x,r_y")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            writeln!(out, "{},{},{}", t, s.position[0], s.position[1])?;
        }
        Ok(())
    }
}

/// Integrates `r'' + damping r' + w0^2 (1 + xi_nl |r|^2) r = f(t)` with the
/// classical fixed-step fourth-order Runge-Kutta scheme.
///
/// The step is adjusted to `t_span / round(t_span / dt)` so that the run
/// ends exactly at `t_span`. `dt * w0` must stay below 0.1.
pub fn integrate<F>(
    params: &OscillatorParams,
    initial: State,
    forcing: F,
    t_span: f64,
    dt: f64,
    nonlinearity: Nonlinearity,
) -> Result<Trajectory>
where
    F: Fn(f64) -> [f64; 2],
{
    params.validate()?;
    if !(dt.is_finite() && dt > 0.0 && t_span.is_finite() && t_span > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and t_span > 0, got dt = {dt}, t_span = {t_span}"
        )));
    }
    let w2 = params.omega0_squared();
    if dt * w2.sqrt() >= 0.1 {
        return Err(Error::InvalidArgument(format!(
            "dt * omega0 = {} must stay below 0.1",
            dt * w2.sqrt()
        )));
    }
    let cubic = match nonlinearity {
        Nonlinearity::Included => params.cubic_rate(),
        Nonlinearity::Neglected => 0.0,
    };
    let damping = params.damping;
    let n = (t_span / dt).round().max(1.0) as usize;
    let h = t_span / n as f64;

    let accel = |t: f64, r: [f64; 2], v: [f64; 2]| -> [f64; 2] {
        let f = forcing(t);
        let k = w2 + cubic * (r[0] * r[0] + r[1] * r[1]);
        [
            f[0] - damping * v[0] - k * r[0],
            f[1] - damping * v[1] - k * r[1],
        ]
    };
    let deriv = |t: f64, s: &[f64; 4]| -> [f64; 4] {
        let a = accel(t, [s[0], s[1]], [s[2], s[3]]);
        [s[2], s[3], a[0], a[1]]
    };

    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut y = [
        initial.position[0],
        initial.position[1],
        initial.velocity[0],
        initial.velocity[1],
    ];
    times.push(0.0);
    states.push(initial);
    for step in 1..=n {
        let t = (step - 1) as f64 * h;
        let k1 = deriv(t, &y);
        let k2 = deriv(t + h / 2.0, &axpy(&y, h / 2.0, &k1));
        let k3 = deriv(t + h / 2.0, &axpy(&y, h / 2.0, &k2));
        let k4 = deriv(t + h, &axpy(&y, h, &k3));
        for i in 0..4 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let state = State {
            position: [y[0], y[1]],
            velocity: [y[2], y[3]],
        };
        let time = step as f64 * h;
        if !state.is_finite() {
            return Err(Error::Divergence { step, time });
        }
        times.push(time);
        states.push(state);
    }
    Ok(Trajectory {
        times,
        states,
        omega0_sq: w2,
        cubic,
    })
}

fn axpy(y: &[f64; 4], a: f64, k: &[f64; 4]) -> [f64; 4] {
    [y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2], y[3] + a * k[3]]
}
