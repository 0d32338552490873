//! Exact closed forms for layer sizes and flow norms.
//!
//! Layers are indexed by `tau` in `{0,1,2}^l`; `N_zero`, `N_x` and `F_j` are
//! the squared norms of `sum_j theta_j`, `sum_j (-1)^{x.j} theta_j` (`x != 0`)
//! and `theta_j` at length `2^l`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Rational = BigRational;

fn int(v: usize) -> BigInt {
    BigInt::from(v)
}

fn pow(base: usize, e: usize) -> BigInt {
    num_traits::pow(int(base), e)
}

fn ratio(num: BigInt, den: BigInt) -> Rational {
    Rational::new(num, den)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `|E_tau| = n^{1 + |tau| - |tau|_0}`.
pub fn layer_size(n: usize, tau: &[u8]) -> BigInt {
    let zeros = tau.iter().filter(|&&t| t == 0).count();
    pow(n, 1 + tau.len() - zeros)
}

/// Every `tau` in `{0,1,2}^l`, most significant letter first.
pub fn layers(l: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..3usize.pow(l as u32)).map(move |mut k| {
        let mut tau = vec![0u8; l];
        for slot in tau.iter_mut().rev() {
            *slot = (k % 3) as u8;
            k /= 3;
        }
        tau
    })
}

/// `sum_tau 1/|E_tau| = (n+2)^l / n^{l+1}`.
pub fn sum_inverse_layers(n: usize, l: usize) -> Rational {
    ratio(pow(n + 2, l), pow(n, l + 1))
}

pub fn sum_inverse_layers_brute(n: usize, l: usize) -> Rational {
    layers(l).fold(Rational::zero(), |acc, tau| acc + ratio(BigInt::one(), layer_size(n, &tau)))
}

/// `N_zero(2^l) = n^2 (n+2)^l / n^{l+1}`; equals `n` at `l = 0`.
pub fn n_zero(n: usize, l: usize) -> Rational {
    sum_inverse_layers(n, l) * Rational::from_integer(pow(n, 2))
}

/// `N_x(2^l) = n^{1-l} (n + (n+2)^l) / (n+1)` for `x != 0`.
pub fn n_x_closed(n: usize, l: usize) -> Rational {
    ratio(int(n) + pow(n + 2, l), int(n + 1)) * ratio(int(n), pow(n, l))
}

/// `N_x(2^l) = (N_x(2^{l-1}) + N_zero(2^{l-1})) / n` from `N_x(1) = n`.
pub fn n_x_recurrence(n: usize, l: usize) -> Rational {
    let nn = Rational::from_integer(int(n));
    let mut value = nn.clone();
    for k in 1..=l {
        value = (value + n_zero(n, k - 1)) / &nn;
    }
    value
}

/// `N_x` for `x != 0`, via the recurrence when `n = 2`.
pub fn n_x(n: usize, l: usize) -> Rational {
    if n == 2 {
        n_x_recurrence(n, l)
    } else {
        n_x_closed(n, l)
    }
}

/// The expression `n^{l+1} + n^3/((n-2)(n+1)) (n^l - (n+2)^l/n^l)`, which
/// solves `P(l) = n P(l-1) + n N_zero(2^{l-1})` with `P(1) = 2 n^2`. Those
/// base and step values leave out the `1/n` in `theta_bar_j`, so `P` is not
/// the norm of the signed sum; kept for comparison. Undefined at `n = 2`.
pub fn n_x_unnormalized(n: usize, l: usize) -> Option<Rational> {
    if n == 2 || l == 0 {
        return None;
    }
    let lead = Rational::from_integer(pow(n, l + 1));
    let factor = ratio(pow(n, 3), int(n - 2) * int(n + 1));
    let inner = Rational::from_integer(pow(n, l)) - ratio(pow(n + 2, l), pow(n, l));
    Some(lead + factor * inner)
}

pub fn n_x_unnormalized_recurrence(n: usize, l: usize) -> Rational {
    let nn = Rational::from_integer(int(n));
    let mut value = Rational::from_integer(int(2) * pow(n, 2));
    for k in 2..=l {
        value = &nn * value + &nn * n_zero(n, k - 1);
    }
    value
}

/// Squared norm of `sum_j (-1)^{x.j} theta_j(2^l)`.
pub fn fourier_norm(n: usize, l: usize, x: usize) -> Rational {
    if x == 0 {
        n_zero(n, l)
    } else {
        n_x(n, l)
    }
}

/// `F_j(2^l) = (2(n+2)^l + n - 1) / ((n+1) n^l)`.
pub fn f_j(n: usize, l: usize) -> Rational {
    ratio(int(2) * pow(n + 2, l) + int(n - 1), int(n + 1) * pow(n, l))
}

/// `F_j(2^l) = (2 N_zero(2^{l-1}) + n F_j(2^{l-1})) / n^2` from `F_j(1) = 1`.
pub fn f_j_recurrence(n: usize, l: usize) -> Rational {
    let mut value = Rational::one();
    for k in 1..=l {
        value = (Rational::from_integer(int(2)) * n_zero(n, k - 1) + Rational::from_integer(int(n)) * value)
            / Rational::from_integer(pow(n, 2));
    }
    value
}

/// Prefix sum `S(p) = sum over tau extending p of 1/|E_tau|`, closed form
/// `(n+2)^{l-k} / n^{l+1-|p|_0}`.
pub fn prefix_sum(n: usize, l: usize, p: &[u8]) -> Rational {
    let zeros = p.iter().filter(|&&t| t == 0).count();
    ratio(pow(n + 2, l - p.len()), pow(n, l + 1 - zeros))
}

pub fn prefix_sum_brute(n: usize, l: usize, p: &[u8]) -> Rational {
    layers(l)
        .filter(|tau| tau.starts_with(p))
        .fold(Rational::zero(), |acc, tau| acc + ratio(BigInt::one(), layer_size(n, &tau)))
}
