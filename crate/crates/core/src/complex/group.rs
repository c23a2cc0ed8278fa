use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::{Error, Result};

/// A finite group given by its multiplication table over elements `0..order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
    label: String,
    names: Option<Vec<String>>,
}

impl FiniteGroup {
    /// The cyclic group Z_n with element `i` standing for `i mod n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("cyclic group order must be positive".into()));
        }
        let mul = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        let inv = (0..n).map(|i| (n - i) % n).collect();
        Ok(Self {
            order: n,
            mul,
            inv,
            identity: 0,
            label: format!("cyclic:{n}"),
            names: None,
        })
    }

    /// Validates a Cayley table: Latin square, two-sided identity, associativity.
    pub fn from_table(
        label: impl Into<String>,
        rows: &[Vec<usize>],
        names: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty multiplication table".into()));
        }
        let mut mul = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if x >= n || seen[x] {
                    return Err(Error::InvalidGroup(format!("row {i} is not a permutation")));
                }
                seen[x] = true;
            }
            mul.extend_from_slice(row);
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for i in 0..n {
                let x = mul[i * n + j];
                if seen[x] {
                    return Err(Error::InvalidGroup(format!("column {j} is not a permutation")));
                }
                seen[x] = true;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul[e * n + x] == x && mul[x * n + e] == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                let ab = mul[a * n + b];
                for c in 0..n {
                    if mul[ab * n + c] != mul[a * n + mul[b * n + c]] {
                        return Err(Error::InvalidGroup(format!(
                            "not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let inv = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| mul[a * n + b] == identity)
                    .expect("Latin square has inverses")
            })
            .collect();
        if let Some(names) = &names {
            if names.len() != n {
                return Err(Error::InvalidGroup(format!(
                    "{} element names for a group of order {n}",
                    names.len()
                )));
            }
        }
        Ok(Self {
            order: n,
            mul,
            inv,
            identity,
            label: label.into(),
            names,
        })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn table_row(&self, a: usize) -> &[usize] {
        &self.mul[a * self.order..(a + 1) * self.order]
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

/// The generator sets `A` and `B` of a left-right Cayley complex.
///
/// Order matters: the position of an element in its set is its coordinate in
/// the local `Δ × Δ` array of every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSets {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl GeneratorSets {
    pub fn new(group: &FiniteGroup, a: Vec<usize>, b: Vec<usize>) -> Result<Self> {
        for (name, set) in [("A", &a), ("B", &b)] {
            let mut seen = vec![false; group.order()];
            for &x in set {
                if x >= group.order() {
                    return Err(Error::InvalidGenerators(format!(
                        "{name} contains {x}, outside a group of order {}",
                        group.order()
                    )));
                }
                if seen[x] {
                    return Err(Error::InvalidGenerators(format!("{name} repeats {x}")));
                }
                seen[x] = true;
            }
            if let Some(&x) = set.iter().find(|&&x| !seen[group.inv(x)]) {
                return Err(Error::InvalidGenerators(format!(
                    "{name} is not closed under inverses: {x} present, {} missing",
                    group.inv(x)
                )));
            }
        }
        if a.len() != b.len() {
            return Err(Error::InvalidGenerators(format!(
                "|A| = {} differs from |B| = {}",
                a.len(),
                b.len()
            )));
        }
        if a.is_empty() {
            return Err(Error::InvalidGenerators("generator sets are empty".into()));
        }
        Ok(Self { a, b })
    }

    /// Samples `A` and `B` independently and uniformly among the
    /// inverse-closed subsets of size `delta`. Each set is returned sorted.
    pub fn random<R: Rng + ?Sized>(group: &FiniteGroup, delta: usize, rng: &mut R) -> Result<Self> {
        let a = random_symmetric_subset(group, delta, rng)?;
        let b = random_symmetric_subset(group, delta, rng)?;
        Self::new(group, a, b)
    }

    #[inline]
    pub fn delta(&self) -> usize {
        self.a.len()
    }

    pub fn position_a(&self, x: usize) -> Option<usize> {
        self.a.iter().position(|&y| y == x)
    }

    pub fn position_b(&self, x: usize) -> Option<usize> {
        self.b.iter().position(|&y| y == x)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn random_symmetric_subset<R: Rng + ?Sized>(
    group: &FiniteGroup,
    delta: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let singles: Vec<usize> = (0..group.order()).filter(|&x| group.inv(x) == x).collect();
    let pairs: Vec<usize> = (0..group.order()).filter(|&x| group.inv(x) > x).collect();
    // A subset with s self-inverse elements has (delta - s) / 2 inverse pairs;
    // weight each s by the number of such subsets to stay uniform.
    let options: Vec<(usize, u128)> = (0..=delta.min(singles.len()))
        .filter(|s| (delta - s).is_multiple_of(2))
        .map(|s| (s, binomial(singles.len(), s) * binomial(pairs.len(), (delta - s) / 2)))
        .filter(|&(_, w)| w > 0)
        .collect();
    let total: u128 = options.iter().map(|&(_, w)| w).sum();
    if total == 0 {
        return Err(Error::InvalidGenerators(format!(
            "no inverse-closed subset of size {delta} in a group of order {}",
            group.order()
        )));
    }
    let mut ticket = rng.random_range(0..total);
    let mut singles_taken = options[0].0;
    for &(s, w) in &options {
        if ticket < w {
            singles_taken = s;
            break;
        }
        ticket -= w;
    }
    let mut set = Vec::with_capacity(delta);
    for i in rand::seq::index::sample(rng, singles.len(), singles_taken) {
        set.push(singles[i]);
    }
    for i in rand::seq::index::sample(rng, pairs.len(), (delta - singles_taken) / 2) {
        set.push(pairs[i]);
        set.push(group.inv(pairs[i]));
    }
    set.sort_unstable();
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn s3_table() -> Vec<Vec<usize>> {
        // Permutations of three points, composed as functions.
        let perms = [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let idx = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
        perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| idx([p[q[0]], p[q[1]], p[q[2]]]))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn cyclic_group() {
        let g = FiniteGroup::cyclic(5).unwrap();
        assert_eq!(g.mul(3, 4), 2);
        assert_eq!(g.inv(2), 3);
        assert_eq!(g.inv(0), 0);
        assert!(g.is_abelian());
        assert!(FiniteGroup::cyclic(0).is_err());
    }

    #[test]
    fn table_group() {
        let g = FiniteGroup::from_table("s3", &s3_table(), None).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.identity(), 0);
        assert!(!g.is_abelian());
        for a in 0..6 {
            assert_eq!(g.mul(a, g.inv(a)), 0);
        }
        let mut bad = s3_table();
        bad[1].swap(0, 1);
        assert!(FiniteGroup::from_table("bad", &bad, None).is_err());
        assert!(FiniteGroup::from_table("ragged", &[vec![0], vec![0, 1]], None).is_err());
    }

    #[test]
    fn generator_validation() {
        let g = FiniteGroup::cyclic(4).unwrap();
        assert!(GeneratorSets::new(&g, vec![1, 3], vec![2, 0]).is_ok());
        assert!(GeneratorSets::new(&g, vec![1], vec![2]).is_err());
        assert!(GeneratorSets::new(&g, vec![1, 1], vec![2, 0]).is_err());
        assert!(GeneratorSets::new(&g, vec![1, 3], vec![2]).is_err());
        assert!(GeneratorSets::new(&g, vec![1, 5], vec![2, 0]).is_err());
    }

    #[test]
    fn random_sets_are_symmetric_and_uniform() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut counts = BTreeMap::new();
        for _ in 0..4000 {
            let sets = GeneratorSets::random(&g, 3, &mut rng).unwrap();
            *counts.entry(sets.a.clone()).or_insert(0) += 1;
        }
        // Inverse-closed 3-subsets of Z_4: {0,1,3} and {1,2,3}.
        assert_eq!(counts.len(), 2);
        for &c in counts.values() {
            assert!((1800..2200).contains(&c), "{counts:?}");
        }
        let g8 = FiniteGroup::cyclic(8).unwrap();
        for _ in 0..20 {
            let s = GeneratorSets::random(&g8, 7, &mut rng).unwrap();
            assert_eq!(s.delta(), 7);
        }
        assert!(GeneratorSets::random(&g8, 9, &mut rng).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(40, 20), 137_846_528_820);
    }
}
