//! Scalar helpers for exact arithmetic over `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Exact rational scalar. `BigRational` keeps every value reduced with a
/// positive denominator.
pub type Rat = BigRational;

/// Dense rational vector.
pub type RVec = Vec<Rat>;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rvec(xs: &[i64]) -> RVec {
    xs.iter().map(|&x| rat(x)).collect()
}

pub fn zeros(n: usize) -> RVec {
    vec![Rat::zero(); n]
}

pub fn unit(n: usize, k: usize) -> RVec {
    let mut v = zeros(n);
    v[k] = Rat::one();
    v
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn add(a: &[Rat], b: &[Rat]) -> RVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> RVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rat], s: &Rat) -> RVec {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[Rat]) -> RVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn norm1(a: &[Rat]) -> Rat {
    a.iter().fold(Rat::zero(), |acc, x| acc + x.abs())
}

pub fn norm_inf(a: &[Rat]) -> Rat {
    a.iter().map(|x| x.abs()).max().unwrap_or_else(Rat::zero)
}

pub fn sq_norm(a: &[Rat]) -> Rat {
    dot(a, a)
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn to_f64_vec(a: &[Rat]) -> Vec<f64> {
    a.iter().map(to_f64).collect()
}

/// Exact conversion of a finite double (every finite `f64` is dyadic).
pub fn from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float")
}

pub fn from_f64_vec(a: &[f64]) -> RVec {
    a.iter().map(|&x| from_f64(x)).collect()
}

/// Nearest rational with denominator `den`.
pub fn round_to(x: f64, den: i64) -> Rat {
    ratio((x * den as f64).round() as i64, den)
}

/// Lexicographic comparison of rational vectors.
pub fn cmp_vec(a: &[Rat], b: &[Rat]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

fn lcm_of_denominators<'a>(xs: impl Iterator<Item = &'a Rat>) -> BigInt {
    xs.fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn gcd_of_numerators(xs: &[BigInt]) -> BigInt {
    xs.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// Scales `v` by a positive factor to a primitive integer vector.
/// The zero vector is returned unchanged.
pub fn primitive_int(v: &[Rat]) -> Vec<BigInt> {
    let l = lcm_of_denominators(v.iter());
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Rat::from_integer(l.clone())).to_integer())
        .collect();
    primitive_bigint(ints)
}

pub fn primitive_bigint(mut ints: Vec<BigInt>) -> Vec<BigInt> {
    let g = gcd_of_numerators(&ints);
    if !g.is_zero() && !g.is_one() {
        for x in ints.iter_mut() {
            *x = &*x / &g;
        }
    }
    ints
}

/// Positive rescaling of `v` to a primitive integer vector, as rationals.
pub fn primitive(v: &[Rat]) -> RVec {
    primitive_int(v)
        .into_iter()
        .map(Rat::from_integer)
        .collect()
}

pub fn int_to_rat(v: &[BigInt]) -> RVec {
    v.iter().cloned().map(Rat::from_integer).collect()
}

/// Parses `"p/q"` or an integer string. Decimal strings such as `"0.25"`
/// are accepted and converted exactly.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational".into());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| format!("invalid numerator in {s:?}"))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| format!("invalid denominator in {s:?}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("invalid decimal {s:?}"));
        }
        let num: BigInt = digits
            .parse()
            .map_err(|_| format!("invalid decimal {s:?}"))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rat::new(num, den);
        return Ok(if negative { -r } else { r });
    }
    let p: BigInt = s.parse().map_err(|_| format!("invalid rational {s:?}"))?;
    Ok(Rat::from_integer(p))
}

/// Exact rank of a rational matrix by Gaussian elimination.
pub fn rank(rows: &[RVec]) -> usize {
    row_echelon(rows.to_vec()).len()
}

/// Reduced row echelon form; returns the nonzero rows with pivot 1.
pub fn row_echelon(mut m: Vec<RVec>) -> Vec<RVec> {
    if m.is_empty() {
        return m;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    m
}

/// Solves the square system `m x = rhs`; `None` when singular.
pub fn solve(m: &[RVec], rhs: &[Rat]) -> Option<RVec> {
    let n = m.len();
    let aug: Vec<RVec> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let red = row_echelon(aug);
    if red.len() < n {
        return None;
    }
    // Pivots must fall in the first n columns.
    let mut x = zeros(n);
    for row in &red {
        let piv = row.iter().position(|v| !v.is_zero())?;
        if piv >= n {
            return None;
        }
        x[piv] = row[n].clone();
    }
    Some(x)
}

/// Basis of the null space of `rows` (each row of length `n`).
pub fn null_space(rows: &[RVec], n: usize) -> Vec<RVec> {
    let red = row_echelon(rows.to_vec());
    let mut pivots = Vec::new();
    for row in &red {
        if let Some(p) = row.iter().position(|v| !v.is_zero()) {
            pivots.push(p);
        }
    }
    let mut basis = Vec::new();
    for free in 0..n {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = zeros(n);
        v[free] = Rat::one();
        for (row, &p) in red.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rat("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rat("-7").unwrap(), rat(-7));
        assert_eq!(parse_rat("-0.25").unwrap(), ratio(-1, 4));
        assert!(parse_rat("1/0").unwrap_err().contains("zero denominator"));
        assert!(parse_rat("abc").is_err());
        assert!(parse_rat("").is_err());
    }

    #[test]
    fn primitive_scaling_keeps_sign() {
        let v = vec![ratio(-2, 3), ratio(4, 3), rat(0)];
        assert_eq!(primitive(&v), rvec(&[-1, 2, 0]));
    }

    #[test]
    fn rank_and_null_space() {
        let m = vec![rvec(&[1, 2, 3]), rvec(&[2, 4, 6]), rvec(&[0, 1, 1])];
        assert_eq!(rank(&m), 2);
        let ns = null_space(&m, 3);
        assert_eq!(ns.len(), 1);
        for row in &m {
            assert!(dot(row, &ns[0]).is_zero());
        }
    }

    #[test]
    fn solves_square_systems() {
        let m = vec![rvec(&[2, 1]), rvec(&[1, 3])];
        let x = solve(&m, &rvec(&[3, 5])).unwrap();
        assert_eq!(x, vec![ratio(4, 5), ratio(7, 5)]);
        assert!(solve(&[rvec(&[1, 1]), rvec(&[2, 2])], &rvec(&[1, 2])).is_none());
    }
}
