//! Two-layer network `u(x) = g0(b1 . g1(a1 x + a0) + b0)` with analytic
//! gradients in the parameters, in the input, and of input-gradient
//! projections in the parameters. The hidden activation `g1` is ReLU unless
//! chosen otherwise.
//!
//! Flat parameter order is `a1` (row-major, `n x k`), `a0`, `b1`, `b0`.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::loss::Interval;
use crate::rng;

/// Output nonlinearity `g0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutputNonlinearity {
    Identity,
    Relu,
    /// `c e^v` for `v <= 0`, `v + c` above.
    Elu(f64),
    Sigmoid,
    Tanh,
    /// `s v / (s - 1 + |v|^s)`, `s > 1`. Maps onto `[-1, 1]`.
    BoundedRational(f64),
    Exp,
}

impl OutputNonlinearity {
    #[inline]
    pub fn value(&self, v: f64) -> f64 {
        match *self {
            Self::Identity => v,
            Self::Relu => v.max(0.0),
            Self::Elu(c) => {
                if v <= 0.0 {
                    c * v.exp()
                } else {
                    v + c
                }
            }
            Self::Sigmoid => sigmoid(v),
            Self::Tanh => v.tanh(),
            Self::BoundedRational(s) => s * v / (s - 1.0 + v.abs().powf(s)),
            Self::Exp => v.exp(),
        }
    }

    /// First derivative. One-sided from the right at kinks except ReLU, where it is 0.
    #[inline]
    pub fn d1(&self, v: f64) -> f64 {
        match *self {
            Self::Identity => 1.0,
            Self::Relu => {
                if v > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Elu(c) => {
                if v <= 0.0 {
                    c * v.exp()
                } else {
                    1.0
                }
            }
            Self::Sigmoid => {
                let g = sigmoid(v);
                g * (1.0 - g)
            }
            Self::Tanh => {
                let t = v.tanh();
                1.0 - t * t
            }
            Self::BoundedRational(s) => {
                let a = v.abs().powf(s);
                let d = s - 1.0 + a;
                s * (s - 1.0) * (1.0 - a) / (d * d)
            }
            Self::Exp => v.exp(),
        }
    }

    #[inline]
    pub fn d2(&self, v: f64) -> f64 {
        match *self {
            Self::Identity | Self::Relu => 0.0,
            Self::Elu(c) => {
                if v <= 0.0 {
                    c * v.exp()
                } else {
                    0.0
                }
            }
            Self::Sigmoid => {
                let g = sigmoid(v);
                g * (1.0 - g) * (1.0 - 2.0 * g)
            }
            Self::Tanh => {
                let t = v.tanh();
                -2.0 * t * (1.0 - t * t)
            }
            Self::BoundedRational(s) => {
                let a = v.abs().powf(s);
                let da = s * v.abs().powf(s - 1.0) * v.signum();
                let d = s - 1.0 + a;
                -s * (s - 1.0) * da * (d + 2.0 * (1.0 - a)) / (d * d * d)
            }
            Self::Exp => v.exp(),
        }
    }

    /// Interval containing every output value.
    pub fn range(&self) -> Interval {
        match self {
            Self::Identity => Interval::REAL,
            Self::Relu => Interval::new(0.0, f64::INFINITY),
            Self::Elu(_) | Self::Exp => Interval::POSITIVE,
            Self::Sigmoid => Interval::UNIT,
            Self::Tanh | Self::BoundedRational(_) => Interval::SYMMETRIC_UNIT,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Relu => "relu",
            Self::Elu(_) => "elu",
            Self::Sigmoid => "sigmoid",
            Self::Tanh => "tanh",
            Self::BoundedRational(_) => "bounded_rational",
            Self::Exp => "exp",
        }
    }

    pub fn param(&self) -> Option<f64> {
        match *self {
            Self::Elu(c) => Some(c),
            Self::BoundedRational(s) => Some(s),
            _ => None,
        }
    }

    /// Builds from a kind name; `elu` defaults to `c = 0.01`, `bounded_rational` to `s = 2`.
    pub fn from_kind(kind: &str, param: Option<f64>) -> Result<Self> {
        let g = match kind {
            "identity" => Self::Identity,
            "relu" => Self::Relu,
            "elu" => {
                let c = param.unwrap_or(0.01);
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::Param(alloc::format!("elu constant must be positive, got {c}")));
                }
                Self::Elu(c)
            }
            "sigmoid" => Self::Sigmoid,
            "tanh" => Self::Tanh,
            "bounded_rational" => {
                let s = param.unwrap_or(2.0);
                if !(s > 1.0 && s.is_finite()) {
                    return Err(Error::Param(alloc::format!("bounded_rational needs s > 1, got {s}")));
                }
                Self::BoundedRational(s)
            }
            "exp" => Self::Exp,
            other => return Err(Error::Param(alloc::format!("unknown output nonlinearity `{other}`"))),
        };
        Ok(g)
    }
}

#[inline]
fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

/// Hidden activation `g1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HiddenActivation {
    #[default]
    Relu,
    /// `ln(1 + e^z)`.
    Softplus,
    Tanh,
}

impl HiddenActivation {
    /// `(g1, g1', g1'')` at `z`. ReLU has `g1'(0) = 0` and `g1'' = 0`.
    #[inline]
    pub fn eval(&self, z: f64) -> (f64, f64, f64) {
        match self {
            Self::Relu => {
                if z > 0.0 {
                    (z, 1.0, 0.0)
                } else {
                    (0.0, 0.0, 0.0)
                }
            }
            Self::Softplus => {
                let g = sigmoid(z);
                (z.max(0.0) + (-z.abs()).exp().ln_1p(), g, g * (1.0 - g))
            }
            Self::Tanh => {
                let t = z.tanh();
                let d = 1.0 - t * t;
                (t, d, -2.0 * t * d)
            }
        }
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self, Self::Relu)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Relu => "relu",
            Self::Softplus => "softplus",
            Self::Tanh => "tanh",
        }
    }

    pub fn from_kind(kind: &str) -> Result<Self> {
        match kind {
            "relu" => Ok(Self::Relu),
            "softplus" => Ok(Self::Softplus),
            "tanh" => Ok(Self::Tanh),
            other => Err(Error::Param(alloc::format!("unknown hidden activation `{other}`"))),
        }
    }
}

/// Hidden pre-activations of one forward pass, reused by the gradient routines.
#[derive(Debug, Clone, Default)]
pub struct Cache {
    z: Vec<f64>,
    v: f64,
}

impl Cache {
    pub fn v(&self) -> f64 {
        self.v
    }
}

/// A `k x n x 1` network.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp2 {
    k: usize,
    n: usize,
    pub a1: Vec<f64>,
    pub a0: Vec<f64>,
    pub b1: Vec<f64>,
    pub b0: f64,
    pub g0: OutputNonlinearity,
    pub g1: HiddenActivation,
}

impl Mlp2 {
    /// All-zero parameters.
    pub fn zeros(k: usize, n: usize, g0: OutputNonlinearity) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::Param(alloc::format!("network sizes must be positive, got {k}x{n}x1")));
        }
        Ok(Mlp2 {
            k,
            n,
            a1: vec![0.0; n * k],
            a0: vec![0.0; n],
            b1: vec![0.0; n],
            b0: 0.0,
            g0,
            g1: HiddenActivation::Relu,
        })
    }

    /// Replaces the hidden activation.
    pub fn with_hidden(mut self, g1: HiddenActivation) -> Self {
        self.g1 = g1;
        self
    }

    /// Glorot-uniform weights, zero offsets.
    pub fn init(k: usize, n: usize, g0: OutputNonlinearity, seed: u64) -> Result<Self> {
        let mut net = Self::zeros(k, n, g0)?;
        let mut rng = rng::seeded(seed);
        let l1 = (6.0 / (k + n) as f64).sqrt();
        for w in &mut net.a1 {
            *w = rng::uniform(&mut rng, -l1, l1);
        }
        let l2 = (6.0 / (n + 1) as f64).sqrt();
        for w in &mut net.b1 {
            *w = rng::uniform(&mut rng, -l2, l2);
        }
        Ok(net)
    }

    pub fn input_size(&self) -> usize {
        self.k
    }

    pub fn hidden_size(&self) -> usize {
        self.n
    }

    /// `n (k + 2) + 1`.
    pub fn param_count(&self) -> usize {
        self.n * (self.k + 2) + 1
    }

    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.param_count());
        p.extend_from_slice(&self.a1);
        p.extend_from_slice(&self.a0);
        p.extend_from_slice(&self.b1);
        p.push(self.b0);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) -> Result<()> {
        self.check_params(p.len())?;
        let (nk, n) = (self.n * self.k, self.n);
        self.a1.copy_from_slice(&p[..nk]);
        self.a0.copy_from_slice(&p[nk..nk + n]);
        self.b1.copy_from_slice(&p[nk + n..nk + 2 * n]);
        self.b0 = p[nk + 2 * n];
        Ok(())
    }

    /// `theta -= step` elementwise.
    pub(crate) fn apply_step(&mut self, step: &[f64]) {
        let (nk, n) = (self.n * self.k, self.n);
        for (w, s) in self.a1.iter_mut().zip(&step[..nk]) {
            *w -= s;
        }
        for (w, s) in self.a0.iter_mut().zip(&step[nk..nk + n]) {
            *w -= s;
        }
        for (w, s) in self.b1.iter_mut().zip(&step[nk + n..nk + 2 * n]) {
            *w -= s;
        }
        self.b0 -= step[nk + 2 * n];
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.k {
            return Err(Error::Dimension { expected: self.k, got: x.len() });
        }
        Ok(())
    }

    fn check_params(&self, len: usize) -> Result<()> {
        if len != self.param_count() {
            return Err(Error::Dimension { expected: self.param_count(), got: len });
        }
        Ok(())
    }

    pub fn new_cache(&self) -> Cache {
        Cache { z: vec![0.0; self.n], v: 0.0 }
    }

    /// Forward pass storing hidden pre-activations in `cache`.
    pub fn forward_cached(&self, x: &[f64], cache: &mut Cache) -> Result<f64> {
        self.check_input(x)?;
        cache.z.resize(self.n, 0.0);
        let mut v = self.b0;
        for j in 0..self.n {
            let row = &self.a1[j * self.k..(j + 1) * self.k];
            let z = self.a0[j] + dot(row, x);
            cache.z[j] = z;
            v += self.b1[j] * self.g1.eval(z).0;
        }
        cache.v = v;
        Ok(self.g0.value(v))
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.forward_cached(x, &mut self.new_cache())
    }

    /// Adds `coef * grad_theta u(x)` into `out`, given the cache of `forward_cached(x)`.
    pub fn accumulate_grad_theta(&self, x: &[f64], cache: &Cache, coef: f64, out: &mut [f64]) {
        self.accumulate_grad_v(x, cache, coef * self.g0.d1(cache.v), out);
    }

    /// Adds `coef * grad_theta v(x)` into `out`, `v` being the pre-output.
    fn accumulate_grad_v(&self, x: &[f64], cache: &Cache, coef: f64, out: &mut [f64]) {
        if coef == 0.0 {
            return;
        }
        let (k, n) = (self.k, self.n);
        let (ga1, rest) = out.split_at_mut(n * k);
        let (ga0, rest) = rest.split_at_mut(n);
        let (gb1, gb0) = rest.split_at_mut(n);
        for j in 0..n {
            let (h, hp, _) = self.g1.eval(cache.z[j]);
            gb1[j] += coef * h;
            if hp != 0.0 {
                let c = coef * self.b1[j] * hp;
                ga0[j] += c;
                for (g, xl) in ga1[j * k..(j + 1) * k].iter_mut().zip(x) {
                    *g += c * xl;
                }
            }
        }
        gb0[0] += coef;
    }

    pub fn grad_theta(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut cache = self.new_cache();
        self.forward_cached(x, &mut cache)?;
        let mut g = vec![0.0; self.param_count()];
        self.accumulate_grad_theta(x, &cache, 1.0, &mut g);
        Ok(g)
    }

    /// Input gradient from a cached forward pass.
    pub fn grad_input_cached(&self, cache: &Cache, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let gp = self.g0.d1(cache.v);
        for j in 0..self.n {
            let hp = self.g1.eval(cache.z[j]).1;
            if hp != 0.0 {
                let c = gp * self.b1[j] * hp;
                for (o, a) in out.iter_mut().zip(&self.a1[j * self.k..(j + 1) * self.k]) {
                    *o += c * a;
                }
            }
        }
    }

    pub fn grad_input(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut cache = self.new_cache();
        self.forward_cached(x, &mut cache)?;
        let mut g = vec![0.0; self.k];
        self.grad_input_cached(&cache, &mut g);
        Ok(g)
    }

    /// `w . grad_x u` from a cached forward pass.
    pub fn directional_input_grad(&self, cache: &Cache, w: &[f64]) -> f64 {
        self.g0.d1(cache.v) * self.hidden_projection(cache, w)
    }

    /// `sum_j b1_j g1'(z_j) (a1_j . w)`.
    fn hidden_projection(&self, cache: &Cache, w: &[f64]) -> f64 {
        let mut s = 0.0;
        for j in 0..self.n {
            let hp = self.g1.eval(cache.z[j]).1;
            if hp != 0.0 {
                s += self.b1[j] * hp * dot(&self.a1[j * self.k..(j + 1) * self.k], w);
            }
        }
        s
    }

    /// Adds `coef * grad_theta [w . grad_x u(x)]` into `out`.
    ///
    /// ReLU is treated as piecewise linear (`g1'' = 0`).
    pub fn accumulate_grad_theta_of_input_grad(
        &self,
        x: &[f64],
        w: &[f64],
        cache: &Cache,
        coef: f64,
        out: &mut [f64],
    ) {
        if coef == 0.0 {
            return;
        }
        let s = self.hidden_projection(cache, w);
        self.accumulate_grad_v(x, cache, coef * self.g0.d2(cache.v) * s, out);
        let c = coef * self.g0.d1(cache.v);
        if c == 0.0 {
            return;
        }
        let (k, n) = (self.k, self.n);
        let (ga1, rest) = out.split_at_mut(n * k);
        let (ga0, rest) = rest.split_at_mut(n);
        let gb1 = &mut rest[..n];
        for j in 0..n {
            let (_, hp, hpp) = self.g1.eval(cache.z[j]);
            if hp == 0.0 && hpp == 0.0 {
                continue;
            }
            let row = &self.a1[j * k..(j + 1) * k];
            let aw = dot(row, w);
            gb1[j] += c * hp * aw;
            let cb = c * self.b1[j];
            let curv = cb * hpp * aw;
            ga0[j] += curv;
            for ((g, wl), xl) in ga1[j * k..(j + 1) * k].iter_mut().zip(w).zip(x) {
                *g += cb * hp * wl + curv * xl;
            }
        }
    }

    pub fn grad_theta_of_input_grad(&self, x: &[f64], w: &[f64]) -> Result<Vec<f64>> {
        self.check_input(w)?;
        let mut cache = self.new_cache();
        self.forward_cached(x, &mut cache)?;
        let mut g = vec![0.0; self.param_count()];
        self.accumulate_grad_theta_of_input_grad(x, w, &cache, 1.0, &mut g);
        Ok(g)
    }

    /// Smallest `|z_j|` over hidden units, i.e. the distance to a ReLU kink.
    /// Infinite for smooth activations.
    pub fn kink_margin(&self, x: &[f64]) -> Result<f64> {
        let mut cache = self.new_cache();
        self.forward_cached(x, &mut cache)?;
        if self.g1.is_smooth() {
            return Ok(f64::INFINITY);
        }
        Ok(cache.z.iter().fold(f64::INFINITY, |m, z| m.min(z.abs())))
    }

    /// Text model record. Floats carry 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "ratio-net-model 1");
        let _ = writeln!(s, "k {}", self.k);
        let _ = writeln!(s, "n {}", self.n);
        match self.g0.param() {
            Some(p) => {
                let _ = writeln!(s, "g0 {} {:.16e}", self.g0.kind(), p);
            }
            None => {
                let _ = writeln!(s, "g0 {}", self.g0.kind());
            }
        }
        let _ = writeln!(s, "g1 {}", self.g1.kind());
        for (name, vals) in [("a1", &self.a1), ("a0", &self.a0), ("b1", &self.b1)] {
            s.push_str(name);
            for v in vals.iter() {
                let _ = write!(s, " {v:.16e}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "b0 {:.16e}", self.b0);
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Format(m.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut field = |name: &str| -> Result<Vec<&str>> {
            let line = lines.next().ok_or_else(|| bad(&alloc::format!("missing `{name}` record")))?;
            let mut it = line.split_ascii_whitespace();
            if it.next() != Some(name) {
                return Err(bad(&alloc::format!("expected `{name}` record, found `{line}`")));
            }
            Ok(it.collect())
        };
        let header = field("ratio-net-model")?;
        if header != ["1"] {
            return Err(bad("unsupported model version"));
        }
        let count = |v: Vec<&str>, name: &str| -> Result<usize> {
            match v.as_slice() {
                [c] => c.parse().map_err(|_| bad(&alloc::format!("bad `{name}`"))),
                _ => Err(bad(&alloc::format!("bad `{name}`"))),
            }
        };
        let k = count(field("k")?, "k")?;
        let n = count(field("n")?, "n")?;
        let g0 = match field("g0")?.as_slice() {
            [kind] => OutputNonlinearity::from_kind(kind, None),
            [kind, p] => {
                OutputNonlinearity::from_kind(kind, Some(p.parse().map_err(|_| bad("bad g0 parameter"))?))
            }
            _ => return Err(bad("bad g0 record")),
        }
        .map_err(|e| bad(&e.to_string()))?;
        let g1 = match field("g1")?.as_slice() {
            [kind] => HiddenActivation::from_kind(kind).map_err(|e| bad(&e.to_string()))?,
            _ => return Err(bad("bad g1 record")),
        };
        let floats = |v: Vec<&str>, len: usize, name: &str| -> Result<Vec<f64>> {
            if v.len() != len {
                return Err(bad(&alloc::format!("`{name}` has {} values, expected {len}", v.len())));
            }
            v.iter().map(|s| s.parse::<f64>().map_err(|_| bad(&alloc::format!("bad float in `{name}`")))).collect()
        };
        let mut net = Self::zeros(k, n, g0).map_err(|e| bad(&e.to_string()))?.with_hidden(g1);
        net.a1 = floats(field("a1")?, n * k, "a1")?;
        net.a0 = floats(field("a0")?, n, "a0")?;
        net.b1 = floats(field("b1")?, n, "b1")?;
        net.b0 = floats(field("b0")?, 1, "b0")?[0];
        if lines.next().is_some() {
            return Err(bad("trailing data after model record"));
        }
        Ok(net)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_net(g0: OutputNonlinearity) -> Mlp2 {
        let mut net = Mlp2::zeros(1, 1, g0).unwrap();
        net.a1[0] = 1.0;
        net.b1[0] = 1.0;
        net
    }

    #[test]
    fn relu_gate_and_bounded_output() {
        let net = unit_net(OutputNonlinearity::Identity);
        assert_eq!(net.forward(&[2.0]).unwrap(), 2.0);
        assert_eq!(net.forward(&[-2.0]).unwrap(), 0.0);
        assert_eq!(net.grad_input(&[2.0]).unwrap(), [1.0]);
        assert_eq!(net.grad_input(&[-2.0]).unwrap(), [0.0]);
        let net = unit_net(OutputNonlinearity::BoundedRational(2.0));
        assert!((net.forward(&[2.0]).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(Mlp2::init(10, 20, OutputNonlinearity::Elu(0.01), 1).unwrap().param_count(), 241);
        assert_eq!(Mlp2::zeros(784, 300, OutputNonlinearity::Identity).unwrap().param_count(), 235_801);
    }

    #[test]
    fn init_is_deterministic() {
        let a = Mlp2::init(1, 20, OutputNonlinearity::Identity, 7).unwrap();
        let b = Mlp2::init(1, 20, OutputNonlinearity::Identity, 7).unwrap();
        assert_eq!(a.params(), b.params());
        assert!(a.a0.iter().all(|&v| v == 0.0) && a.b0 == 0.0);
    }

    #[test]
    fn zero_sizes_rejected() {
        assert!(Mlp2::zeros(0, 3, OutputNonlinearity::Identity).is_err());
    }

    #[test]
    fn dimension_errors() {
        let net = Mlp2::zeros(3, 2, OutputNonlinearity::Identity).unwrap();
        assert_eq!(net.forward(&[1.0]), Err(Error::Dimension { expected: 3, got: 1 }));
        let mut net = net;
        assert!(net.set_params(&[0.0; 4]).is_err());
    }

    #[test]
    fn bias_gradient_is_output_slope() {
        let net = Mlp2::init(3, 4, OutputNonlinearity::Sigmoid, 2).unwrap();
        let x = [0.3, -0.2, 0.9];
        let g = net.grad_theta(&x).unwrap();
        let mut cache = net.new_cache();
        net.forward_cached(&x, &mut cache).unwrap();
        assert_eq!(*g.last().unwrap(), net.g0.d1(cache.v()));
    }

    #[test]
    fn zero_input_gives_zero_a1_gradient() {
        let net = Mlp2::init(3, 5, OutputNonlinearity::Identity, 4).unwrap();
        let g = net.grad_theta(&[0.0; 3]).unwrap();
        assert!(g[..15].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bilinear_mixed_gradient() {
        let mut net = unit_net(OutputNonlinearity::Identity);
        net.a1[0] = 0.7;
        net.b1[0] = -1.3;
        let g = net.grad_theta_of_input_grad(&[0.5], &[1.0]).unwrap();
        // [a1, a0, b1, b0]
        assert_eq!(g, [-1.3, 0.0, 0.7, 0.0]);
        let g = net.grad_theta_of_input_grad(&[0.5], &[0.0]).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn elu_is_continuous_at_zero() {
        let g = OutputNonlinearity::Elu(0.01);
        assert_eq!(g.value(0.0), 0.01);
        assert!((g.value(1e-12) - 0.01).abs() < 1e-11);
        let g = OutputNonlinearity::Elu(1.0);
        assert!((g.d1(-1e-12) - g.d1(1e-12)).abs() < 1e-11);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let net = Mlp2::init(10, 20, OutputNonlinearity::Elu(0.01), 1).unwrap();
        let back = Mlp2::from_text(&net.to_text()).unwrap();
        assert_eq!(back, net);
        let x = [0.1; 10];
        assert_eq!(back.forward(&x).unwrap().to_bits(), net.forward(&x).unwrap().to_bits());
    }

    #[test]
    fn smooth_hidden_round_trip_and_values() {
        let net = Mlp2::init(2, 3, OutputNonlinearity::Identity, 1).unwrap().with_hidden(HiddenActivation::Softplus);
        assert_eq!(Mlp2::from_text(&net.to_text()).unwrap(), net);
        let (h, hp, hpp) = HiddenActivation::Softplus.eval(0.0);
        assert!((h - 2f64.ln()).abs() < 1e-15);
        assert_eq!((hp, hpp), (0.5, 0.25));
        assert_eq!(HiddenActivation::Softplus.eval(800.0).0, 800.0);
        assert_eq!(net.kink_margin(&[0.0, 0.0]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn truncated_record_is_rejected() {
        let text = Mlp2::init(2, 3, OutputNonlinearity::Tanh, 1).unwrap().to_text();
        let cut = &text[..text.len() / 2];
        assert!(matches!(Mlp2::from_text(cut), Err(Error::Format(_))));
        assert!(matches!(Mlp2::from_text("nonsense"), Err(Error::Format(_))));
    }
}
