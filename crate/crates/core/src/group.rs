//! Finite groups as explicit multiplication tables.
//!
//! Everything downstream works with element indices into these tables; labels
//! exist only for fixtures and reports.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A finite group given by its full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinGroup {
    pub labels: Vec<String>,
    /// `mul[x][y]` = index of x·y.
    pub mul: Vec<Vec<usize>>,
    pub inv: Vec<usize>,
    pub one: usize,
}

impl FinGroup {
    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x][y]
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inv[x]
    }

    /// x · y · x⁻¹
    pub fn conj(&self, x: usize, y: usize) -> usize {
        self.mul(self.mul(x, y), self.inv(x))
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.order()
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Builds the table closure from labels and a raw multiplication table,
    /// checking the group axioms.
    pub fn from_table(labels: Vec<String>, mul: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        if mul.len() != n || mul.iter().any(|r| r.len() != n) {
            return Err(Error::GroupMismatch(format!(
                "multiplication table is not {n}x{n}"
            )));
        }
        if mul.iter().flatten().any(|&v| v >= n) {
            return Err(Error::GroupMismatch("table entry out of range".into()));
        }
        let one = (0..n)
            .find(|&e| (0..n).all(|x| mul[e][x] == x && mul[x][e] == x))
            .ok_or_else(|| Error::GroupMismatch("no identity element".into()))?;
        let mut inv = vec![usize::MAX; n];
        for x in 0..n {
            inv[x] = (0..n)
                .find(|&y| mul[x][y] == one && mul[y][x] == one)
                .ok_or_else(|| Error::GroupMismatch(format!("element {x} has no inverse")))?;
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if mul[mul[x][y]][z] != mul[x][mul[y][z]] {
                        return Err(Error::GroupMismatch(format!(
                            "associativity fails at ({x},{y},{z})"
                        )));
                    }
                }
            }
        }
        Ok(FinGroup {
            labels,
            mul,
            inv,
            one,
        })
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|x| (x..n).all(|y| self.mul[x][y] == self.mul[y][x]))
    }

    pub fn center(&self) -> Vec<usize> {
        self.elements()
            .filter(|&z| self.elements().all(|x| self.mul(z, x) == self.mul(x, z)))
            .collect()
    }

    /// Z/n with additive labels "0".."n-1".
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let labels = (0..n).map(|i| i.to_string()).collect();
        let mul = (0..n)
            .map(|x| (0..n).map(|y| (x + y) % n).collect())
            .collect();
        let inv = (0..n).map(|x| (n - x) % n).collect();
        FinGroup {
            labels,
            mul,
            inv,
            one: 0,
        }
    }

    pub fn trivial() -> Self {
        FinGroup::cyclic(1)
    }

    /// Direct product; labels are "a|b".
    pub fn product(g: &FinGroup, h: &FinGroup) -> Self {
        let n = g.order();
        let m = h.order();
        let idx = |x: usize, y: usize| x * m + y;
        let labels = (0..n)
            .flat_map(|x| (0..m).map(move |y| (x, y)))
            .map(|(x, y)| format!("{}|{}", g.label(x), h.label(y)))
            .collect();
        let mut mul = vec![vec![0; n * m]; n * m];
        for x1 in 0..n {
            for y1 in 0..m {
                for x2 in 0..n {
                    for y2 in 0..m {
                        mul[idx(x1, y1)][idx(x2, y2)] = idx(g.mul(x1, x2), h.mul(y1, y2));
                    }
                }
            }
        }
        let inv = (0..n)
            .flat_map(|x| (0..m).map(move |y| (x, y)))
            .map(|(x, y)| idx(g.inv(x), h.inv(y)))
            .collect();
        FinGroup {
            labels,
            mul,
            inv,
            one: idx(g.one, h.one),
        }
    }

    /// Symmetric group on 3 letters, generated by r = (123), s = (12).
    pub fn symmetric3() -> Self {
        Self::from_permutations(3, &["e", "r", "r2", "s", "sr", "sr2"], |name| match name {
            "e" => vec![0, 1, 2],
            "r" => vec![1, 2, 0],
            "r2" => vec![2, 0, 1],
            "s" => vec![1, 0, 2],
            "sr" => vec![0, 2, 1],
            "sr2" => vec![2, 1, 0],
            _ => unreachable!(),
        })
    }

    /// Dihedral group of order 8 acting on the square's vertices.
    pub fn dihedral4() -> Self {
        Self::from_permutations(
            4,
            &["e", "r", "r2", "r3", "s", "sr", "sr2", "sr3"],
            |name| match name {
                "e" => vec![0, 1, 2, 3],
                "r" => vec![1, 2, 3, 0],
                "r2" => vec![2, 3, 0, 1],
                "r3" => vec![3, 0, 1, 2],
                "s" => vec![1, 0, 3, 2],
                "sr" => vec![2, 1, 0, 3],
                "sr2" => vec![3, 2, 1, 0],
                "sr3" => vec![0, 3, 2, 1],
                _ => unreachable!(),
            },
        )
    }

    /// Quaternion group of order 8.
    pub fn quaternion8() -> Self {
        // Regular representation over {1,-1,i,-i,j,-j,k,-k}.
        let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];
        let neg = |x: usize| x ^ 1;
        let base_mul = |x: usize, y: usize| -> usize {
            // on representatives 0=1, 2=i, 4=j, 6=k
            match (x, y) {
                (0, y) => y,
                (x, 0) => x,
                (2, 2) => 1,
                (4, 4) => 1,
                (6, 6) => 1,
                (2, 4) => 6,
                (4, 2) => 7,
                (4, 6) => 2,
                (6, 4) => 3,
                (6, 2) => 4,
                (2, 6) => 5,
                _ => unreachable!(),
            }
        };
        let mut mul = vec![vec![0usize; 8]; 8];
        for x in 0..8 {
            for y in 0..8 {
                let mut v = base_mul(x & !1, y & !1);
                if x & 1 == 1 {
                    v = neg(v);
                }
                if y & 1 == 1 {
                    v = neg(v);
                }
                mul[x][y] = v;
            }
        }
        FinGroup::from_table(labels.iter().map(|s| s.to_string()).collect(), mul)
            .expect("quaternion table")
    }

    fn from_permutations(
        degree: usize,
        names: &[&str],
        perm_of: impl Fn(&str) -> Vec<usize>,
    ) -> Self {
        let perms: Vec<Vec<usize>> = names.iter().map(|n| perm_of(n)).collect();
        let compose = |p: &[usize], q: &[usize]| -> Vec<usize> {
            // (p∘q)(x) = p(q(x))
            (0..degree).map(|x| p[q[x]]).collect()
        };
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).expect("closed table");
        let mul = perms
            .iter()
            .map(|p| perms.iter().map(|q| index(&compose(p, q))).collect())
            .collect();
        FinGroup::from_table(names.iter().map(|s| s.to_string()).collect(), mul)
            .expect("permutation table is a group")
    }

    /// Inner automorphism group A/Z(A) with coset labels, together with the
    /// projection a ↦ [a].
    pub fn inner_quotient(&self) -> (FinGroup, Vec<usize>) {
        let center = self.center();
        self.quotient_by(&center)
    }

    /// Quotient by a normal subgroup given as a sorted element list.
    pub fn quotient_by(&self, normal: &[usize]) -> (FinGroup, Vec<usize>) {
        let n = self.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut reps: Vec<usize> = Vec::new();
        for x in 0..n {
            if coset_of[x] != usize::MAX {
                continue;
            }
            let c = reps.len();
            for &z in normal {
                coset_of[self.mul(x, z)] = c;
            }
            reps.push(x);
        }
        let m = reps.len();
        let mut mul = vec![vec![0; m]; m];
        for (i, &x) in reps.iter().enumerate() {
            for (j, &y) in reps.iter().enumerate() {
                mul[i][j] = coset_of[self.mul(x, y)];
            }
        }
        let labels = reps
            .iter()
            .map(|&x| format!("[{}]", self.label(x)))
            .collect();
        let q = FinGroup::from_table(labels, mul).expect("quotient by normal subgroup");
        (q, coset_of)
    }

    pub fn order_of(&self, x: usize) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != self.one {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn pow(&self, x: usize, k: usize) -> usize {
        let mut acc = self.one;
        for _ in 0..k {
            acc = self.mul(acc, x);
        }
        acc
    }

    /// Closure of a set of elements as a sorted subgroup list.
    pub fn span(&self, seed: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.one] = true;
        let mut stack = vec![self.one];
        while let Some(x) = stack.pop() {
            for &g in seed {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..self.order()).filter(|&x| seen[x]).collect()
    }

    /// Decomposes an abelian group into a true direct sum of cyclic factors:
    /// generators g_i of order d_i with A ≅ ⊕ Z/d_i, plus for every element
    /// its coordinate vector.  The coordinate map is an isomorphism.
    pub fn cyclic_decomposition(&self) -> Result<AbelianBasis> {
        if !self.is_abelian() {
            return Err(Error::GroupMismatch(
                "cyclic decomposition needs an abelian group".into(),
            ));
        }
        // Split off one maximal-order generator at a time.  In an abelian
        // group a subgroup H maximal with H ∩ ⟨g⟩ = 1, for g of maximal
        // order, is a complement of ⟨g⟩.
        let mut gens: Vec<usize> = Vec::new();
        let mut orders: Vec<usize> = Vec::new();
        let mut ambient: Vec<usize> = (0..self.order()).collect();
        while ambient.len() > 1 {
            let &g = ambient
                .iter()
                .max_by_key(|&&x| self.order_of(x))
                .expect("nonempty");
            let d = self.order_of(g);
            let g_span = self.span(&[g]);
            let mut comp: Vec<usize> = vec![self.one];
            let mut comp_seed: Vec<usize> = Vec::new();
            for &x in &ambient {
                if comp.contains(&x) {
                    continue;
                }
                let mut seed = comp_seed.clone();
                seed.push(x);
                let bigger = self.span(&seed);
                if !bigger.iter().any(|y| *y != self.one && g_span.contains(y)) {
                    comp_seed = seed;
                    comp = bigger;
                }
            }
            if comp.len() * d != ambient.len() {
                return Err(Error::GroupMismatch(
                    "abelian complement computation failed".into(),
                ));
            }
            gens.push(g);
            orders.push(d);
            ambient = comp;
        }
        // Coordinates by peeling factors: x = g_0^{k_0} · rest with rest in
        // the span of the later generators.
        let n = self.order();
        let mut coords = vec![vec![0usize; gens.len()]; n];
        for x in 0..n {
            let mut rest = x;
            for (i, (&g, &d)) in gens.iter().zip(orders.iter()).enumerate() {
                let tail_span = self.span(&gens[i + 1..]);
                let k = (0..d)
                    .find(|&k| tail_span.contains(&self.mul(rest, self.inv(self.pow(g, k)))))
                    .ok_or_else(|| {
                        Error::GroupMismatch("decomposition coordinates failed".into())
                    })?;
                coords[x][i] = k;
                rest = self.mul(rest, self.inv(self.pow(g, k)));
            }
            if rest != self.one {
                return Err(Error::GroupMismatch(
                    "decomposition coordinates failed".into(),
                ));
            }
        }
        Ok(AbelianBasis {
            gens,
            orders,
            coords,
        })
    }
}

/// A choice of cyclic generators for an abelian group.
#[derive(Debug, Clone)]
pub struct AbelianBasis {
    pub gens: Vec<usize>,
    pub orders: Vec<usize>,
    /// coords[x] = exponents of x in the generators.
    pub coords: Vec<Vec<usize>>,
}

/// A homomorphism between two table groups, as an index map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHom {
    pub map: Vec<usize>,
}

impl GroupHom {
    pub fn identity(g: &FinGroup) -> Self {
        GroupHom {
            map: (0..g.order()).collect(),
        }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn check(&self, src: &FinGroup, dst: &FinGroup) -> Result<()> {
        if self.map.len() != src.order() {
            return Err(Error::GroupMismatch("hom domain size mismatch".into()));
        }
        if self.map.iter().any(|&v| v >= dst.order()) {
            return Err(Error::GroupMismatch("hom value out of range".into()));
        }
        for x in src.elements() {
            for y in src.elements() {
                if self.map[src.mul(x, y)] != dst.mul(self.map[x], self.map[y]) {
                    return Err(Error::GroupMismatch(format!(
                        "not a homomorphism at ({}, {})",
                        src.label(x),
                        src.label(y)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn compose(&self, then: &GroupHom) -> GroupHom {
        GroupHom {
            map: self.map.iter().map(|&x| then.map[x]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_groups_check_out() {
        for n in 1..=8 {
            let g = FinGroup::cyclic(n);
            FinGroup::from_table(g.labels.clone(), g.mul.clone()).unwrap();
            assert!(g.is_abelian());
        }
    }

    #[test]
    fn symmetric3_is_nonabelian_with_trivial_center() {
        let s3 = FinGroup::symmetric3();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        assert_eq!(s3.center(), vec![s3.one]);
        let (inner, _) = s3.inner_quotient();
        assert_eq!(inner.order(), 6);
    }

    #[test]
    fn dihedral4_center_has_order_two() {
        let d4 = FinGroup::dihedral4();
        assert_eq!(d4.order(), 8);
        assert_eq!(d4.center().len(), 2);
        let (inner, _) = d4.inner_quotient();
        assert_eq!(inner.order(), 4);
    }

    #[test]
    fn quaternion8_is_a_group_with_center_two() {
        let q8 = FinGroup::quaternion8();
        assert_eq!(q8.order(), 8);
        assert_eq!(q8.center().len(), 2);
    }

    #[test]
    fn cyclic_decomposition_of_products() {
        let g = FinGroup::product(&FinGroup::cyclic(2), &FinGroup::cyclic(4));
        let basis = g.cyclic_decomposition().unwrap();
        let mut orders = basis.orders.clone();
        orders.sort();
        assert_eq!(orders.iter().product::<usize>(), 8);
        assert_eq!(orders, vec![2, 4]);
        // coords reconstruct every element
        for x in g.elements() {
            let c = &basis.coords[x];
            let mut acc = g.one;
            for (i, &k) in c.iter().enumerate() {
                let mut p = g.one;
                for _ in 0..k {
                    p = g.mul(p, basis.gens[i]);
                }
                acc = g.mul(acc, p);
            }
            assert_eq!(acc, x);
        }
    }

    #[test]
    fn hom_check_rejects_non_homs() {
        let z4 = FinGroup::cyclic(4);
        let z2 = FinGroup::cyclic(2);
        let good = GroupHom {
            map: vec![0, 1, 0, 1],
        };
        good.check(&z4, &z2).unwrap();
        let bad = GroupHom {
            map: vec![0, 1, 1, 0],
        };
        assert!(bad.check(&z4, &z2).is_err());
    }
}
