//! Construction and verification of square-difference-free subsets of [N].

use std::io::{BufRead, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par;

/// A subset of [1, N], stored sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerSet {
    n: u64,
    elements: Vec<u64>,
}

/// Witness for a failed square-difference-free check: a - b = step^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SquareDifference {
    pub a: u64,
    pub b: u64,
    pub step: u64,
}

impl IntegerSet {
    pub fn new(n: u64, mut elements: Vec<u64>) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        elements.sort_unstable();
        elements.dedup();
        if let (Some(&lo), Some(&hi)) = (elements.first(), elements.last()) {
            if lo < 1 || hi > n {
                return Err(Error::InvalidArgument(format!(
                    "elements must lie in [1, {n}]"
                )));
            }
        }
        Ok(IntegerSet { n, elements })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn density(&self) -> f64 {
        self.elements.len() as f64 / self.n as f64
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Membership bitmap indexed 0..=N.
    pub fn bitmap(&self) -> Vec<bool> {
        let mut bits = vec![false; self.n as usize + 1];
        for &x in &self.elements {
            bits[x as usize] = true;
        }
        bits
    }

    /// File format: header comment `# N=<value>`, one decimal integer per line.
    pub fn read_from(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut n: Option<u64> = None;
        let mut elements = Vec::new();
        for line in std::io::BufReader::new(file).lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("N=") {
                    n = Some(
                        v.trim()
                            .parse()
                            .map_err(|e| Error::Parse(format!("bad N header: {e}")))?,
                    );
                }
                continue;
            }
            elements.push(
                line.parse::<u64>()
                    .map_err(|e| Error::Parse(format!("bad integer {line:?}: {e}")))?,
            );
        }
        let n = match n {
            Some(n) => n,
            None => *elements.iter().max().ok_or_else(|| {
                Error::Parse("file has neither an N header nor elements".into())
            })?,
        };
        IntegerSet::new(n, elements)
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        writeln!(file, "# N={}", self.n)?;
        for x in &self.elements {
            writeln!(file, "{x}")?;
        }
        Ok(())
    }
}

/// Checks that no pair a > b in the set has a - b a perfect square.
/// Returns the lexicographically smallest witness (a, then step) on failure.
/// Cost O(|A| sqrt(N)): each element scans the squares below it.
pub fn is_sdf(set: &IntegerSet) -> Option<SquareDifference> {
    let bits = set.bitmap();
    let witnesses = par::map_indices(set.len(), |i| {
        let a = set.elements()[i];
        let mut step = 1u64;
        while step * step < a {
            let b = a - step * step;
            if bits[b as usize] {
                return Some(SquareDifference { a, b, step });
            }
            step += 1;
        }
        None
    });
    witnesses.into_iter().flatten().min_by_key(|w| (w.a, w.step))
}

/// Greedy scan of 1..=N, keeping every integer that preserves the
/// square-difference-free property.
pub fn greedy_sdf(n: u64) -> Result<IntegerSet> {
    if n < 1 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let mut bits = vec![false; n as usize + 1];
    let mut elements = Vec::new();
    for c in 1..=n {
        if admissible(&bits, c) {
            bits[c as usize] = true;
            elements.push(c);
        }
    }
    IntegerSet::new(n, elements)
}

fn admissible(bits: &[bool], c: u64) -> bool {
    let mut step = 1u64;
    while step * step < c {
        if bits[(c - step * step) as usize] {
            return false;
        }
        step += 1;
    }
    true
}

/// Greedy-filters the residue class {x ≡ r mod q} in [1, N] into an SDF set.
/// With a seed, candidates are first thinned independently with probability 1/2
/// (ChaCha8, reproducible across platforms).
pub fn planted_sdf(n: u64, q: u64, r: u64, seed: Option<u64>) -> Result<IntegerSet> {
    if q < 1 || r < 1 || r > q {
        return Err(Error::InvalidArgument("need 1 <= r <= q".into()));
    }
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut bits = vec![false; n as usize + 1];
    let mut elements = Vec::new();
    let mut c = r;
    while c <= n {
        let keep = match rng.as_mut() {
            Some(rng) => rng.gen_bool(0.5),
            None => true,
        };
        if keep && admissible(&bits, c) {
            bits[c as usize] = true;
            elements.push(c);
        }
        c += q;
    }
    IntegerSet::new(n, elements)
}

/// Greedy-filters a random subset of [1, N] (each integer kept with the given
/// probability before the SDF filter) into an SDF set.
pub fn random_sdf(n: u64, keep_prob: f64, seed: u64) -> Result<IntegerSet> {
    if !(0.0..=1.0).contains(&keep_prob) {
        return Err(Error::InvalidArgument("keep probability must be in [0,1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bits = vec![false; n as usize + 1];
    let mut elements = Vec::new();
    for c in 1..=n {
        if rng.gen_bool(keep_prob) && admissible(&bits, c) {
            bits[c as usize] = true;
            elements.push(c);
        }
    }
    IntegerSet::new(n, elements)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: u64, elems: &[u64]) -> IntegerSet {
        IntegerSet::new(n, elems.to_vec()).unwrap()
    }

    /// O(|A|^2) pairwise oracle.
    fn is_sdf_pairwise(s: &IntegerSet) -> bool {
        let e = s.elements();
        for i in 0..e.len() {
            for j in 0..i {
                let d = e[i] - e[j];
                let r = d.isqrt();
                if r * r == d {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn is_sdf_examples() {
        assert!(is_sdf(&set(3, &[1, 3])).is_none());
        assert_eq!(
            is_sdf(&set(2, &[1, 2])),
            Some(SquareDifference { a: 2, b: 1, step: 1 })
        );
        assert_eq!(
            is_sdf(&set(5, &[1, 5])),
            Some(SquareDifference { a: 5, b: 1, step: 2 })
        );
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(greedy_sdf(1).unwrap().elements(), &[1]);
        // Direct simulation of the greedy scan.
        assert_eq!(greedy_sdf(10).unwrap().elements(), &[1, 3, 6, 8]);
    }

    #[test]
    fn greedy_is_prefix_stable() {
        let big = greedy_sdf(2000).unwrap();
        for n in [10u64, 100, 500] {
            let small = greedy_sdf(n).unwrap();
            let prefix: Vec<u64> = big
                .elements()
                .iter()
                .copied()
                .take_while(|&x| x <= n)
                .collect();
            assert_eq!(small.elements(), prefix.as_slice());
        }
    }

    #[test]
    fn constructors_produce_sdf_sets() {
        assert!(is_sdf(&greedy_sdf(5000).unwrap()).is_none());
        let planted = planted_sdf(20, 2, 1, None).unwrap();
        assert!(is_sdf(&planted).is_none());
        assert!(planted.elements().iter().all(|x| x % 2 == 1));
        let planted = planted_sdf(1000, 3, 1, Some(7)).unwrap();
        assert!(is_sdf(&planted).is_none());
        assert!(planted.elements().iter().all(|x| x % 3 == 1));
        assert!(is_sdf(&random_sdf(1000, 0.5, 42).unwrap()).is_none());
    }

    #[test]
    fn sqrt_scan_matches_pairwise_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let n = rng.gen_range(10..500);
            let elems: Vec<u64> = (1..=n).filter(|_| rng.gen_bool(0.3)).collect();
            let s = IntegerSet::new(n, elems).unwrap();
            assert!(s.len() <= 200 || true);
            assert_eq!(is_sdf(&s).is_none(), is_sdf_pairwise(&s));
        }
    }

    #[test]
    fn seeded_constructors_deterministic() {
        assert_eq!(
            planted_sdf(500, 3, 2, Some(1)).unwrap(),
            planted_sdf(500, 3, 2, Some(1)).unwrap()
        );
        assert_eq!(random_sdf(500, 0.4, 5).unwrap(), random_sdf(500, 0.4, 5).unwrap());
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join("sqdiff-sdf-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("set.txt");
        let s = greedy_sdf(100).unwrap();
        s.write_to(&path).unwrap();
        assert_eq!(IntegerSet::read_from(&path).unwrap(), s);
    }
}
