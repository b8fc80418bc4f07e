use rand::seq::SliceRandom as _;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::quantum::binary_entropy;
use crate::{Error, Result};

/// An instance of `HAM^(d)_n`: is `Δ(x, y) <= d`?
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HamInstance {
    pub n: usize,
    pub d: usize,
    pub x: BitString,
    pub y: BitString,
}

impl HamInstance {
    pub fn new(d: usize, x: BitString, y: BitString) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch(x.len(), y.len()));
        }
        let n = x.len();
        if d > n {
            return Err(Error::InvalidParameter(format!("threshold {d} exceeds length {n}")));
        }
        Ok(Self { n, d, x, y })
    }

    pub fn distance(&self) -> usize {
        (0..self.n).filter(|&i| self.x.get(i) != self.y.get(i)).count()
    }
}

pub fn ham_predicate(inst: &HamInstance) -> bool {
    inst.distance() <= inst.d
}

/// Uniform `x` and a `y` at distance exactly `delta` from it.
pub fn instance_at_distance<R: Rng + ?Sized>(n: usize, d: usize, delta: usize, rng: &mut R) -> Result<HamInstance> {
    if delta > n {
        return Err(Error::InvalidParameter(format!("distance {delta} exceeds length {n}")));
    }
    let x: BitString = (0..n).map(|_| rng.gen::<bool>()).collect();
    let mut y = x.clone();
    let mut coords: Vec<usize> = (0..n).collect();
    let (flipped, _) = coords.partial_shuffle(rng, delta);
    for &i in flipped.iter() {
        y.set(i, !y.get(i));
    }
    HamInstance::new(d, x, y)
}

/// Encodes a `d`-bit string `z` and a 1-based index `i` as `HAM^(d)_n` inputs:
/// `x = z 0^{n-d}` and `y = e_i 1^{d+1-|z|} 0^{n-2d-1+|z|}`, so that
/// `Δ(x, y) = d + 2 - 2 z_i`.
pub fn rac_reduction(z: &BitString, i: usize, n: usize) -> Result<(BitString, BitString)> {
    let d = z.len();
    if d == 0 || i == 0 || i > d {
        return Err(Error::InvalidParameter(format!("index {i} outside 1..={d}")));
    }
    if n < 2 * d + 1 {
        return Err(Error::InvalidParameter(format!("need n >= 2d + 1 = {}, got {n}", 2 * d + 1)));
    }
    let w = z.weight();
    let mut x = z.clone();
    (d..n).for_each(|_| x.push(false));
    let mut y = BitString::zeros(d);
    y.set(i - 1, true);
    (0..d + 1 - w).for_each(|_| y.push(true));
    (0..n + w - 2 * d - 1).for_each(|_| y.push(false));
    Ok((x, y))
}

/// `1 - H(2/3)`, the per-bit capacity in the random-access-code bound.
pub fn rac_rate() -> f64 {
    1.0 - binary_entropy(2.0 / 3.0)
}

/// Whether `log2(d) + q >= (1 - H(2/3)) d`, i.e. `q` qubits are not ruled out for `HAM^(d)`.
pub fn nayak_check(d: usize, q_qubits: f64) -> Result<bool> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    Ok((d as f64).log2() + q_qubits >= rac_rate() * d as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn predicate_edges() {
        let x = bits("0110");
        assert!(ham_predicate(&HamInstance::new(0, x.clone(), x.clone()).unwrap()));
        assert!(!ham_predicate(&HamInstance::new(0, x.clone(), bits("0111")).unwrap()));
        assert!(!ham_predicate(&HamInstance::new(1, x.clone(), bits("1111")).unwrap()));
        assert!(HamInstance::new(5, x.clone(), x.clone()).is_err());
        assert!(HamInstance::new(1, x, bits("01")).is_err());
    }

    #[test]
    fn sampled_distance_is_exact() {
        let mut rng = crate::seed::derive_rng(0, &["ham-instances".into()]);
        for delta in 0..=10 {
            let inst = instance_at_distance(10, 2, delta, &mut rng).unwrap();
            assert_eq!(inst.distance(), delta);
        }
        assert!(instance_at_distance(4, 1, 5, &mut rng).is_err());
    }

    #[test]
    fn rac_layout() {
        let (x, y) = rac_reduction(&bits("010"), 2, 8).unwrap();
        assert_eq!(x.to_string(), "01000000");
        assert_eq!(y.to_string(), "01011100");
        assert_eq!(x.hamming_distance(&y).unwrap(), 3);
        let (x, y) = rac_reduction(&bits("000"), 1, 8).unwrap();
        assert_eq!(x.hamming_distance(&y).unwrap(), 5);
        assert!(rac_reduction(&bits("000"), 0, 8).is_err());
        assert!(rac_reduction(&bits("000"), 1, 6).is_err());
    }

    #[test]
    fn nayak_arithmetic() {
        assert!((rac_rate() - 0.0817).abs() < 1e-4);
        assert!(!nayak_check(1024, 0.0).unwrap());
        assert!((1..200).all(|d| nayak_check(d, d as f64).unwrap()));
        assert!(nayak_check(0, 1.0).is_err());
    }
}
