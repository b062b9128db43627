//! Permutations and permutation groups via a deterministic Schreier–Sims
//! stabilizer chain.
//!
//! Permutations act on the right: `x^(gh) = (x^g)^h`, so `g.then(&h)` is the
//! product `gh`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("image list is not a permutation of 0..{0}")]
    NotBijective(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("group order {0} exceeds the enumeration limit {1}")]
    TooLarge(BigUint, u64),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation {
    images: Vec<u32>,
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = PermError;
    fn try_from(images: Vec<u32>) -> Result<Self, PermError> {
        Permutation::from_images(images)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Vec<u32> {
        p.images
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        for c in self.cycles() {
            let parts: Vec<String> = c.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(PermError::NotBijective(n));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn from_usize(images: &[usize]) -> Result<Self, PermError> {
        Self::from_images(images.iter().map(|&x| x as u32).collect())
    }

    /// Builds a permutation from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                if x >= n {
                    return Err(PermError::NotBijective(n));
                }
                images[x] = c[(i + 1) % c.len()] as u32;
            }
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// The product `self · other`: first `self`, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self.images.iter().map(|&x| other.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y as usize] = x as u32;
        }
        Permutation { images }
    }

    /// `self^g = g⁻¹ · self · g`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        g.inverse().then(self).then(g)
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    pub fn fixes(&self, x: usize) -> bool {
        self.apply(x) == x
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.degree()).filter(|&x| self.fixes(x)).collect()
    }

    /// Non-trivial cycles, each starting at its least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for s in 0..self.degree() {
            if seen[s] || self.fixes(s) {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut x = self.apply(s);
            while x != s {
                seen[x] = true;
                c.push(x);
                x = self.apply(x);
            }
            out.push(c);
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| acc.lcm(&(c.len() as u64)))
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    /// Extends to degree `n ≥ degree` by fixing the new points.
    pub fn extend(&self, n: usize) -> Permutation {
        let mut images = self.images.clone();
        images.extend(self.degree() as u32..n as u32);
        Permutation { images }
    }

    /// Restriction to `0..n`, assuming that range is invariant.
    pub fn restrict(&self, n: usize) -> Permutation {
        Permutation {
            images: self.images[..n].to_vec(),
        }
    }
}

#[derive(Debug, Clone)]
struct Level {
    point: usize,
    orbit: Vec<usize>,
    /// `transversal[β]` maps the base point to `β`.
    transversal: Vec<Option<Permutation>>,
}

/// A permutation group with a stabilizer chain.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    base: Vec<usize>,
    strong: Vec<Permutation>,
    levels: Vec<Level>,
}

impl PermGroup {
    pub fn trivial(degree: usize) -> Self {
        Self::new(degree, Vec::new()).expect("trivial group")
    }

    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self, PermError> {
        Self::with_base_prefix(degree, generators, &[])
    }

    /// Builds the chain so that its base starts with `prefix` (prefix points
    /// may give trivial levels). Then the strong generators fixing the first
    /// `i` prefix points generate their pointwise stabilizer.
    pub fn with_base_prefix(degree: usize, generators: Vec<Permutation>, prefix: &[usize]) -> Result<Self, PermError> {
        for g in &generators {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch(g.degree(), degree));
            }
        }
        let generators: Vec<Permutation> = generators.into_iter().filter(|g| !g.is_identity()).collect();
        let mut grp = PermGroup {
            degree,
            generators: generators.clone(),
            base: prefix.to_vec(),
            strong: generators,
            levels: Vec::new(),
        };
        grp.schreier_sims();
        Ok(grp)
    }

    fn level_gens(&self, i: usize) -> Vec<&Permutation> {
        let fixed = &self.base[..i];
        self.strong
            .iter()
            .filter(|s| fixed.iter().all(|&b| s.fixes(b)))
            .collect()
    }

    fn build_level(&self, i: usize) -> Level {
        let point = self.base[i];
        let gens = self.level_gens(i);
        let mut transversal: Vec<Option<Permutation>> = vec![None; self.degree];
        transversal[point] = Some(Permutation::identity(self.degree));
        let mut orbit = vec![point];
        let mut k = 0;
        while k < orbit.len() {
            let b = orbit[k];
            let ub = transversal[b].clone().expect("orbit point has a transversal");
            for s in &gens {
                let c = s.apply(b);
                if transversal[c].is_none() {
                    transversal[c] = Some(ub.then(s));
                    orbit.push(c);
                }
            }
            k += 1;
        }
        Level {
            point,
            orbit,
            transversal,
        }
    }

    /// Sifts `g` through levels `from..`; returns the residue and the level
    /// at which sifting stopped (`levels.len()` if it passed all of them).
    fn strip(&self, g: &Permutation, from: usize) -> (Permutation, usize) {
        let mut h = g.clone();
        for (m, level) in self.levels.iter().enumerate().skip(from) {
            let beta = h.apply(level.point);
            match &level.transversal[beta] {
                Some(u) => h = h.then(&u.inverse()),
                None => return (h, m),
            }
        }
        (h, self.levels.len())
    }

    fn schreier_sims(&mut self) {
        for s in self.strong.clone() {
            if self.base.iter().all(|&b| s.fixes(b)) {
                let moved = (0..self.degree).find(|&x| !s.fixes(x)).expect("non-identity");
                self.base.push(moved);
            }
        }
        self.levels = (0..self.base.len()).map(|i| self.build_level(i)).collect();
        let mut i = self.levels.len();
        while i > 0 {
            let lvl = i - 1;
            let mut restart = None;
            'outer: for bi in 0..self.levels[lvl].orbit.len() {
                let beta = self.levels[lvl].orbit[bi];
                let gens: Vec<Permutation> = self.level_gens(lvl).into_iter().cloned().collect();
                for s in &gens {
                    let ub = self.levels[lvl].transversal[beta].as_ref().expect("transversal");
                    let ubs = ub.then(s);
                    let target = ubs.apply(self.levels[lvl].point);
                    let ut = self.levels[lvl].transversal[target].as_ref().expect("orbit is closed");
                    if ubs == *ut {
                        continue;
                    }
                    let schreier = ubs.then(&ut.inverse());
                    let (h, j) = self.strip(&schreier, lvl + 1);
                    if j < self.levels.len() || !h.is_identity() {
                        if j == self.levels.len() {
                            let moved = (0..self.degree).find(|&x| !h.fixes(x)).expect("non-identity residue");
                            self.base.push(moved);
                            self.levels.push(Level {
                                point: moved,
                                orbit: vec![],
                                transversal: vec![],
                            });
                        }
                        self.strong.push(h);
                        for l in lvl + 1..=j {
                            self.levels[l] = self.build_level(l);
                        }
                        restart = Some(j + 1);
                        break 'outer;
                    }
                }
            }
            match restart {
                Some(r) => i = r,
                None => i -= 1,
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong
    }

    /// Fundamental orbit lengths along the base.
    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub fn is_trivial(&self) -> bool {
        self.levels.iter().all(|l| l.orbit.len() == 1)
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (h, j) = self.strip(g, 0);
        j == self.levels.len() && h.is_identity()
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.generators.iter().all(|g| other.contains(g))
    }

    /// Group elements, in the order of the transversal product.
    pub fn elements(&self, limit: u64) -> Result<Vec<Permutation>, PermError> {
        let order = self.order();
        if order > BigUint::from(limit) {
            return Err(PermError::TooLarge(order, limit));
        }
        let mut out = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let reps: Vec<&Permutation> = level
                .orbit
                .iter()
                .map(|&b| level.transversal[b].as_ref().expect("transversal"))
                .collect();
            let mut next = Vec::with_capacity(out.len() * reps.len());
            for g in &out {
                for u in &reps {
                    next.push(g.then(u));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// The orbit of `x`, in discovery order.
    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[x] = true;
        let mut orbit = vec![x];
        let mut k = 0;
        while k < orbit.len() {
            let y = orbit[k];
            for g in &self.generators {
                let z = g.apply(y);
                if !seen[z] {
                    seen[z] = true;
                    orbit.push(z);
                }
            }
            k += 1;
        }
        orbit
    }

    /// Orbits on `0..degree`, each sorted, ordered by least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        orbits_of(self.degree, &self.generators)
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .enumerate()
            .all(|(i, a)| self.generators[i + 1..].iter().all(|b| a.then(b) == b.then(a)))
    }

    /// Pointwise stabilizer of `points`.
    pub fn stabilizer(&self, points: &[usize]) -> PermGroup {
        let chain = PermGroup::with_base_prefix(self.degree, self.strong.clone(), points).expect("same degree");
        let gens: Vec<Permutation> = chain
            .strong
            .iter()
            .filter(|s| points.iter().all(|&p| s.fixes(p)))
            .cloned()
            .collect();
        PermGroup::new(self.degree, gens).expect("same degree")
    }

    /// An element mapping `x` to `y`, if one exists.
    pub fn transporter(&self, x: usize, y: usize) -> Option<Permutation> {
        let mut word: Vec<Option<Permutation>> = vec![None; self.degree];
        word[x] = Some(Permutation::identity(self.degree));
        let mut queue = vec![x];
        let mut k = 0;
        while k < queue.len() {
            let a = queue[k];
            if a == y {
                return word[a].clone();
            }
            let wa = word[a].clone().expect("visited");
            for g in &self.generators {
                let b = g.apply(a);
                if word[b].is_none() {
                    word[b] = Some(wa.then(g));
                    queue.push(b);
                }
            }
            k += 1;
        }
        None
    }

    /// Orbits of the point stabilizer of `x`; the first one is `{x}`.
    pub fn suborbits(&self, x: usize) -> Vec<Vec<usize>> {
        let stab = self.stabilizer(&[x]);
        let mut orbs = stab.orbits();
        orbs.sort_by_key(|o| (o[0] != x, o.len(), o[0]));
        orbs
    }

    /// Number of orbits of a point stabilizer; meaningful for transitive groups.
    pub fn rank(&self) -> usize {
        if self.degree == 0 {
            return 0;
        }
        self.stabilizer(&[0]).orbits().len()
    }
}

/// Orbits of the group generated by `gens` on `0..degree`.
pub fn orbits_of(degree: usize, gens: &[Permutation]) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; degree];
    let mut out = Vec::new();
    for s in 0..degree {
        if label[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        label[s] = id;
        let mut orb = vec![s];
        let mut k = 0;
        while k < orb.len() {
            let y = orb[k];
            for g in gens {
                let z = g.apply(y);
                if label[z] == usize::MAX {
                    label[z] = id;
                    orb.push(z);
                }
            }
            k += 1;
        }
        orb.sort_unstable();
        out.push(orb);
    }
    out
}

/// All subgroups of a group of order at most `limit`, as joins of cyclic
/// subgroups, sorted by order.
pub fn enumerate_subgroups(group: &PermGroup, limit: u64) -> Result<Vec<PermGroup>, PermError> {
    let elements = group.elements(limit)?;
    let index: HashMap<&Permutation, usize> = elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let size = elements.len();
    let words = size.div_ceil(64);

    // closure of a generating set as an element bitset
    let close = |gens: &[usize]| -> Vec<u64> {
        let mut bits = vec![0u64; words];
        let id = index[&Permutation::identity(group.degree())];
        bits[id / 64] |= 1 << (id % 64);
        let mut queue = vec![id];
        let mut k = 0;
        while k < queue.len() {
            let x = &elements[queue[k]];
            for &g in gens {
                let y = index[&x.then(&elements[g])];
                if bits[y / 64] >> (y % 64) & 1 == 0 {
                    bits[y / 64] |= 1 << (y % 64);
                    queue.push(y);
                }
            }
            k += 1;
        }
        bits
    };

    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut cyclic: Vec<(usize, Vec<u64>)> = Vec::new();
    for g in 0..size {
        let bits = close(&[g]);
        if seen.insert(bits.clone()) {
            cyclic.push((g, bits));
        }
    }
    let mut found: Vec<(Vec<usize>, Vec<u64>)> = cyclic.iter().map(|(g, b)| (vec![*g], b.clone())).collect();
    let mut k = 0;
    while k < found.len() {
        let (gens, bits) = found[k].clone();
        for (c, cbits) in &cyclic {
            if cbits.iter().zip(&bits).all(|(a, b)| a & !b == 0) {
                continue;
            }
            let mut joined = gens.clone();
            joined.push(*c);
            let jbits = close(&joined);
            if seen.insert(jbits.clone()) {
                found.push((joined, jbits));
            }
        }
        k += 1;
    }
    let mut out: Vec<PermGroup> = found
        .into_iter()
        .map(|(gens, _)| {
            let gens = gens.into_iter().map(|i| elements[i].clone()).collect();
            PermGroup::new(group.degree(), gens).expect("same degree")
        })
        .collect();
    out.sort_by_key(PermGroup::order);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: usize) -> PermGroup {
        let cycle: Vec<usize> = (0..n).collect();
        PermGroup::new(
            n,
            vec![
                Permutation::from_cycles(n, &[&cycle]).unwrap(),
                Permutation::from_cycles(n, &[&[0, 1]]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn right_action_composition() {
        let a = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        let b = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        // 0 → 1 under a, then 1 → 2 under b
        assert_eq!(a.then(&b).apply(0), 2);
        assert_eq!(a.then(&a.inverse()), Permutation::identity(3));
        assert_eq!(a.then(&b).order(), 3);
        assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn symmetric_group_orders() {
        assert_eq!(sym(5).order(), BigUint::from(120u32));
        assert_eq!(sym(8).order(), BigUint::from(40320u32));
        assert_eq!(PermGroup::trivial(4).order(), BigUint::one());
    }

    #[test]
    fn membership() {
        let a5 = PermGroup::new(
            5,
            vec![
                Permutation::from_cycles(5, &[&[0, 1, 2]]).unwrap(),
                Permutation::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(a5.order_u64(), Some(60));
        assert!(a5.contains(&Permutation::from_cycles(5, &[&[0, 1], &[2, 3]]).unwrap()));
        assert!(!a5.contains(&Permutation::from_cycles(5, &[&[0, 1]]).unwrap()));
    }

    #[test]
    fn stabilizers_and_rank() {
        let s5 = sym(5);
        let st = s5.stabilizer(&[0]);
        assert_eq!(st.order_u64(), Some(24));
        assert!(st.generators().iter().all(|g| g.fixes(0)));
        assert_eq!(s5.stabilizer(&[0, 3]).order_u64(), Some(6));
        assert_eq!(s5.rank(), 2);
        let c5 = PermGroup::new(5, vec![Permutation::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap()]).unwrap();
        assert_eq!(c5.rank(), 5);
    }

    #[test]
    fn prefix_levels_may_be_trivial() {
        let g = PermGroup::with_base_prefix(
            4,
            vec![Permutation::from_cycles(4, &[&[0, 1]]).unwrap()],
            &[2, 3, 0],
        )
        .unwrap();
        assert_eq!(g.base()[..3], [2, 3, 0]);
        assert_eq!(g.order_u64(), Some(2));
    }

    #[test]
    fn elements_match_order() {
        let s4 = sym(4);
        let els = s4.elements(100).unwrap();
        assert_eq!(els.len(), 24);
        let distinct: HashSet<_> = els.iter().collect();
        assert_eq!(distinct.len(), 24);
        assert!(sym(9).elements(1000).is_err());
    }

    #[test]
    fn subgroups_of_small_groups() {
        // S3 has 6 subgroups, S4 has 30
        assert_eq!(enumerate_subgroups(&sym(3), 100).unwrap().len(), 6);
        assert_eq!(enumerate_subgroups(&sym(4), 100).unwrap().len(), 30);
    }

    #[test]
    fn transporter_maps_points() {
        let s5 = sym(5);
        let t = s5.transporter(1, 4).unwrap();
        assert_eq!(t.apply(1), 4);
        assert!(s5.contains(&t));
    }

    #[test]
    fn serde_as_image_list() {
        let p = Permutation::from_cycles(3, &[&[0, 2]]).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[2,1,0]");
        let q: Permutation = serde_json::from_str("[2,1,0]").unwrap();
        assert_eq!(p, q);
        assert!(serde_json::from_str::<Permutation>("[0,0]").is_err());
    }
}
