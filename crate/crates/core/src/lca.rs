//! Finite abelian groups ℤ_{d1}×…×ℤ_{dk}, their characters, subgroups,
//! annihilators, coset transversals and covolumes.
//!
//! The dual group is identified with the group itself through the pairing
//! ω(x) = exp(2πi Σ ω_i x_i / d_i). Elements are enumerated lexicographically,
//! which coincides with the mixed-radix index (first component most significant).

use std::collections::HashSet;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub type Element = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    orders: Vec<usize>,
}

/// Builds ℤ_{d1}×…×ℤ_{dk}; the empty list gives the trivial group.
pub fn make_group(orders: &[i64]) -> Result<FiniteAbelianGroup> {
    let mut out = Vec::with_capacity(orders.len());
    for &d in orders {
        if d < 1 {
            return Err(Error::invalid(format!("group order {d} must be positive")));
        }
        out.push(d as usize);
    }
    Ok(FiniteAbelianGroup { orders: out })
}

impl FiniteAbelianGroup {
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.iter().any(|&d| d == 0) {
            return Err(Error::invalid("group orders must be positive"));
        }
        Ok(FiniteAbelianGroup { orders })
    }

    pub fn cyclic(d: usize) -> Self {
        FiniteAbelianGroup {
            orders: vec![d.max(1)],
        }
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn cardinality(&self) -> usize {
        self.orders.iter().product()
    }

    /// Least common multiple of the orders; every pairing value is a multiple of 1/exponent.
    pub fn exponent(&self) -> usize {
        self.orders.iter().fold(1, |acc, &d| acc.lcm(&d))
    }

    /// G×G, the phase space of G under the self-dual identification.
    pub fn phase_space(&self) -> FiniteAbelianGroup {
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&self.orders);
        FiniteAbelianGroup { orders }
    }

    pub fn zero(&self) -> Element {
        vec![0; self.rank()]
    }

    pub fn is_element(&self, x: &[usize]) -> bool {
        x.len() == self.rank() && x.iter().zip(&self.orders).all(|(&xi, &d)| xi < d)
    }

    pub fn check(&self, x: &[usize]) -> Result<()> {
        if self.is_element(x) {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "{x:?} is not an element of Z{:?}",
                self.orders
            )))
        }
    }

    /// Reduces an arbitrary integer tuple into the group.
    pub fn reduce(&self, x: &[i64]) -> Result<Element> {
        if x.len() != self.rank() {
            return Err(Error::invalid(format!(
                "expected {} components, got {}",
                self.rank(),
                x.len()
            )));
        }
        Ok(x.iter()
            .zip(&self.orders)
            .map(|(&xi, &d)| xi.rem_euclid(d as i64) as usize)
            .collect())
    }

    pub fn index_of(&self, x: &[usize]) -> usize {
        x.iter()
            .zip(&self.orders)
            .fold(0, |acc, (&xi, &d)| acc * d + xi)
    }

    pub fn element(&self, mut idx: usize) -> Element {
        let mut x = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            x[i] = idx % self.orders[i];
            idx /= self.orders[i];
        }
        x
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.cardinality()).map(move |i| self.element(i))
    }

    pub fn add(&self, x: &[usize], y: &[usize]) -> Element {
        x.iter()
            .zip(y)
            .zip(&self.orders)
            .map(|((&a, &b), &d)| (a + b) % d)
            .collect()
    }

    pub fn neg(&self, x: &[usize]) -> Element {
        x.iter()
            .zip(&self.orders)
            .map(|(&a, &d)| (d - a) % d)
            .collect()
    }

    pub fn sub(&self, x: &[usize], y: &[usize]) -> Element {
        self.add(x, &self.neg(y))
    }

    pub fn add_index(&self, i: usize, j: usize) -> usize {
        let (x, y) = (self.element(i), self.element(j));
        self.index_of(&self.add(&x, &y))
    }

    /// Numerator k of the pairing ω(x) = exp(2πi k / exponent).
    pub fn pairing_phase(&self, omega: &[usize], x: &[usize]) -> usize {
        let l = self.exponent();
        let mut acc = 0usize;
        for ((&w, &xi), &d) in omega.iter().zip(x).zip(&self.orders) {
            acc = (acc + (w * xi % d) * (l / d)) % l;
        }
        acc
    }

    pub fn character(&self, omega: &[usize], x: &[usize]) -> Result<Complex64> {
        self.check(omega)?;
        self.check(x)?;
        Ok(unit_root(self.pairing_phase(omega, x), self.exponent()))
    }
}

/// exp(2πi k / n).
pub fn unit_root(k: usize, n: usize) -> Complex64 {
    let k = k % n;
    // Exact values on the axes keep phases like −1 and ±i free of rounding.
    if 4 * k % n == 0 {
        return match 4 * k / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Counting,
    Normalized,
    Weighted,
}

/// A Haar measure on a finite group: a constant weight per point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measure {
    pub kind: MeasureKind,
    #[serde(with = "rational::as_object")]
    pub weight: Rational,
}

impl Measure {
    pub fn counting() -> Self {
        Measure {
            kind: MeasureKind::Counting,
            weight: Rational::from_integer(1),
        }
    }

    /// The Fourier-inversion partner of counting measure on a group of order n.
    pub fn normalized(n: usize) -> Self {
        Measure {
            kind: MeasureKind::Normalized,
            weight: Rational::new(1, n as i64),
        }
    }

    pub fn weighted(weight: Rational) -> Self {
        Measure {
            kind: MeasureKind::Weighted,
            weight,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Subgroup {
    ambient: FiniteAbelianGroup,
    generators: Vec<Element>,
    /// Ambient indices of the members, ascending (lexicographic order).
    members: Vec<usize>,
    contains: Vec<bool>,
    measure: Measure,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.members == other.members
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    fn from_members(
        ambient: FiniteAbelianGroup,
        generators: Vec<Element>,
        mut members: Vec<usize>,
    ) -> Self {
        members.sort_unstable();
        members.dedup();
        let mut contains = vec![false; ambient.cardinality()];
        for &m in &members {
            contains[m] = true;
        }
        Subgroup {
            ambient,
            generators,
            members,
            contains,
            measure: Measure::counting(),
        }
    }

    pub fn ambient(&self) -> &FiniteAbelianGroup {
        &self.ambient
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn member_indices(&self) -> &[usize] {
        &self.members
    }

    pub fn elements(&self) -> Vec<Element> {
        self.members
            .iter()
            .map(|&i| self.ambient.element(i))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: &[usize]) -> bool {
        self.ambient.is_element(x) && self.contains[self.ambient.index_of(x)]
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.contains[i]
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn with_measure(mut self, measure: Measure) -> Self {
        self.measure = measure;
        self
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.ambient == other.ambient && self.members.iter().all(|&m| other.contains[m])
    }

    /// Smallest generating set found greedily in lexicographic order.
    fn minimal_generators(ambient: &FiniteAbelianGroup, members: &[usize]) -> Vec<Element> {
        let mut gens: Vec<Element> = Vec::new();
        let mut span = vec![false; ambient.cardinality()];
        span[0] = true;
        let mut span_list = vec![0usize];
        for &m in members {
            if span[m] {
                continue;
            }
            gens.push(ambient.element(m));
            span_list = closure_indices(ambient, &span_list, &[m]);
            for &s in &span_list {
                span[s] = true;
            }
        }
        gens
    }
}

/// Closure of `start` (assumed to contain 0 and be closed) under adding `gens`.
fn closure_indices(ambient: &FiniteAbelianGroup, start: &[usize], gens: &[usize]) -> Vec<usize> {
    let n = ambient.cardinality();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for &s in start {
        if !seen[s] {
            seen[s] = true;
            out.push(s);
        }
    }
    if !seen[0] {
        seen[0] = true;
        out.push(0);
    }
    let gens: Vec<Element> = gens.iter().map(|&g| ambient.element(g)).collect();
    let mut head = 0;
    while head < out.len() {
        let x = ambient.element(out[head]);
        head += 1;
        for g in &gens {
            let y = ambient.index_of(&ambient.add(&x, g));
            if !seen[y] {
                seen[y] = true;
                out.push(y);
            }
        }
    }
    out
}

pub fn subgroup_from_generators(group: &FiniteAbelianGroup, gens: &[Element]) -> Result<Subgroup> {
    for g in gens {
        group.check(g)?;
    }
    let idx: Vec<usize> = gens.iter().map(|g| group.index_of(g)).collect();
    let members = closure_indices(group, &[0], &idx);
    Ok(Subgroup::from_members(
        group.clone(),
        gens.to_vec(),
        members,
    ))
}

/// Subgroup from an explicit member list; fails if the set is not a subgroup.
pub fn subgroup_from_members(group: &FiniteAbelianGroup, members: Vec<usize>) -> Result<Subgroup> {
    let set: HashSet<usize> = members.iter().copied().collect();
    if !set.contains(&0) {
        return Err(Error::invalid("subgroup must contain 0"));
    }
    for &a in &set {
        for &b in &set {
            if !set.contains(&group.add_index(a, b)) {
                return Err(Error::invalid("member set is not closed under addition"));
            }
        }
    }
    let mut members: Vec<usize> = set.into_iter().collect();
    members.sort_unstable();
    let gens = Subgroup::minimal_generators(group, &members);
    Ok(Subgroup::from_members(group.clone(), gens, members))
}

/// H^⊥ = {ω : ω(x) = 1 for all x ∈ H}, by scanning Ĝ ≅ G.
pub fn annihilator(group: &FiniteAbelianGroup, h: &Subgroup) -> Result<Subgroup> {
    if h.ambient() != group {
        return Err(Error::invalid("subgroup lives in a different group"));
    }
    let tests: Vec<Element> = if h.generators.is_empty() && h.len() > 1 {
        h.elements()
    } else {
        h.generators.clone()
    };
    let members: Vec<usize> = (0..group.cardinality())
        .filter(|&w| {
            let omega = group.element(w);
            tests.iter().all(|x| group.pairing_phase(&omega, x) == 0)
        })
        .collect();
    let gens = Subgroup::minimal_generators(group, &members);
    let n = group.cardinality() as i64;
    let out = Subgroup::from_members(group.clone(), gens, members);
    Ok(out.with_measure(Measure::weighted(Rational::new(h.len() as i64, n))))
}

/// For each ambient index, the index of the lexicographically smallest element of its coset.
pub fn coset_representatives(group: &FiniteAbelianGroup, h: &Subgroup) -> Vec<usize> {
    let n = group.cardinality();
    let mut rep = vec![usize::MAX; n];
    let hs = h.elements();
    for i in 0..n {
        if rep[i] != usize::MAX {
            continue;
        }
        let x = group.element(i);
        for y in &hs {
            rep[group.index_of(&group.add(&x, y))] = i;
        }
    }
    rep
}

/// One representative per coset of H, each the lexicographic minimum of its coset.
pub fn quotient_transversal(group: &FiniteAbelianGroup, h: &Subgroup) -> Result<Vec<Element>> {
    if h.ambient() != group {
        return Err(Error::invalid("subgroup lives in a different group"));
    }
    let rep = coset_representatives(group, h);
    Ok((0..group.cardinality())
        .filter(|&i| rep[i] == i)
        .map(|i| group.element(i))
        .collect())
}

/// s(Λ) = |G| / |Λ| for Λ ≤ G×Ĝ with counting measure on Λ and
/// counting × (1/|G|)·counting on the phase space.
pub fn covolume(group: &FiniteAbelianGroup, lambda: &Subgroup) -> Result<Rational> {
    if lambda.ambient() != &group.phase_space() {
        return Err(Error::invalid(
            "lattice must be a subgroup of the phase space G×Ĝ",
        ));
    }
    Ok(Rational::new(
        group.cardinality() as i64,
        lambda.len() as i64,
    ))
}

/// s_G(H) = |G| / |H| with counting measures on both.
pub fn subgroup_covolume(group: &FiniteAbelianGroup, h: &Subgroup) -> Rational {
    Rational::new(group.cardinality() as i64, h.len() as i64)
}

/// Every subgroup of `group`, sorted by member list.
pub fn all_subgroups(group: &FiniteAbelianGroup) -> Vec<Subgroup> {
    let n = group.cardinality();
    let mut found: HashSet<Vec<usize>> = HashSet::new();
    let mut queue: Vec<Vec<usize>> = vec![vec![0]];
    found.insert(vec![0]);
    let mut head = 0;
    while head < queue.len() {
        let current = queue[head].clone();
        head += 1;
        let mut inside = vec![false; n];
        for &m in &current {
            inside[m] = true;
        }
        for x in 0..n {
            if inside[x] {
                continue;
            }
            let mut next = closure_indices(group, &current, &[x]);
            next.sort_unstable();
            if found.insert(next.clone()) {
                queue.push(next);
            }
        }
    }
    let mut all: Vec<Vec<usize>> = queue;
    all.sort();
    all.into_iter()
        .map(|members| {
            let gens = Subgroup::minimal_generators(group, &members);
            Subgroup::from_members(group.clone(), gens, members)
        })
        .collect()
}

/// Serialized form `{orders, generators}` shared by groups and subgroups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub orders: Vec<usize>,
    #[serde(default)]
    pub generators: Vec<Vec<i64>>,
}

impl GroupSpec {
    pub fn group(&self) -> Result<FiniteAbelianGroup> {
        FiniteAbelianGroup::new(self.orders.clone())
    }

    pub fn subgroup(&self) -> Result<Subgroup> {
        let g = self.group()?;
        let gens = self
            .generators
            .iter()
            .map(|x| g.reduce(x))
            .collect::<Result<Vec<_>>>()?;
        subgroup_from_generators(&g, &gens)
    }

    pub fn of(sub: &Subgroup) -> Self {
        GroupSpec {
            orders: sub.ambient().orders().to_vec(),
            generators: sub
                .generators()
                .iter()
                .map(|g| g.iter().map(|&v| v as i64).collect())
                .collect(),
        }
    }
}
