//! Permutations on {0, .., n-1}, cycle types, product embeddings, and
//! conjugacy-class machinery for explicitly generated groups.

use serde::Serialize;
use std::collections::HashMap;
use std::fmt;

use crate::error::PermError;

/// Default cap on the number of elements `generate_group` will materialize.
pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

/// A permutation of {0, .., n-1} stored as its image table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from an image table, checking it is a bijection.
    pub fn from_images(images: Vec<u32>) -> Result<Perm, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &img in &images {
            let img = img as usize;
            if img >= n {
                return Err(PermError::ImageOutOfRange { image: img, degree: n });
            }
            if seen[img] {
                return Err(PermError::DuplicateImage { image: img });
            }
            seen[img] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation of the given degree from 0-indexed cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<u32>]) -> Result<Perm, PermError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut moved = vec![false; degree];
        for cycle in cycles {
            for (k, &pt) in cycle.iter().enumerate() {
                let pt = pt as usize;
                if pt >= degree {
                    return Err(PermError::ImageOutOfRange { image: pt, degree });
                }
                if moved[pt] {
                    return Err(PermError::OverlappingCycles { point: pt });
                }
                moved[pt] = true;
                images[pt] = cycle[(k + 1) % cycle.len()];
            }
        }
        Perm::from_images(images)
    }

    /// Parses 1-indexed cycle notation such as `(1 2)(3 4 5)`; `()` is the identity.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Perm, PermError> {
        let mut cycles: Vec<Vec<u32>> = Vec::new();
        let mut current: Option<Vec<u32>> = None;
        let mut num: Option<u64> = None;
        for ch in text.chars() {
            match ch {
                '(' => {
                    if current.is_some() {
                        return Err(PermError::BadCycleSyntax(text.to_string()));
                    }
                    current = Some(Vec::new());
                }
                ')' => {
                    let mut cyc = current.take().ok_or_else(|| PermError::BadCycleSyntax(text.to_string()))?;
                    if let Some(n) = num.take() {
                        cyc.push(to_point(n, degree)?);
                    }
                    if !cyc.is_empty() {
                        cycles.push(cyc);
                    }
                }
                '0'..='9' => {
                    let cur = num.unwrap_or(0);
                    num = Some(cur * 10 + (ch as u64 - '0' as u64));
                }
                ' ' | ',' => {
                    if let Some(n) = num.take() {
                        current
                            .as_mut()
                            .ok_or_else(|| PermError::BadCycleSyntax(text.to_string()))?
                            .push(to_point(n, degree)?);
                    }
                }
                _ => return Err(PermError::BadCycleSyntax(text.to_string())),
            }
        }
        if current.is_some() || num.is_some() {
            return Err(PermError::BadCycleSyntax(text.to_string()));
        }
        Perm::from_cycles(degree, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: u32) -> u32 {
        self.images[i as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &img)| i as u32 == img)
    }

    /// Composition acting left of `other`: `(self.compose(other))(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in composition");
        Perm {
            images: other.images.iter().map(|&i| self.images[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u32; self.degree()];
        for (i, &img) in self.images.iter().enumerate() {
            images[img as usize] = i as u32;
        }
        Perm { images }
    }

    /// `self` raised to the k-th power (k may be 0).
    pub fn pow(&self, k: u64) -> Perm {
        let mut images = vec![0u32; self.degree()];
        for start in 0..self.degree() as u32 {
            let mut pt = start;
            // Walk k steps along the cycle through `start`, shortcutting by the cycle length.
            let mut len = 1u64;
            let mut q = self.apply(start);
            while q != start {
                len += 1;
                q = self.apply(q);
            }
            for _ in 0..(k % len) {
                pt = self.apply(pt);
            }
            images[start as usize] = pt;
        }
        Perm { images }
    }

    /// Multiplicative order of the permutation.
    pub fn order(&self) -> u64 {
        self.cycle_type()
            .parts()
            .iter()
            .fold(1u64, |acc, &l| num_integer::lcm(acc, l as u64))
    }

    pub fn orbit_count(&self) -> usize {
        self.cycle_type().parts().len()
    }

    /// Index of the permutation: degree minus number of orbits.
    pub fn ind(&self) -> u64 {
        (self.degree() - self.orbit_count()) as u64
    }

    pub fn cycle_type(&self) -> CycleType {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut parts = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u32;
            let mut pt = start;
            while !seen[pt] {
                seen[pt] = true;
                len += 1;
                pt = self.images[pt] as usize;
            }
            parts.push(len);
        }
        CycleType::new(parts).expect("cycle lengths of a valid permutation")
    }

    /// 1-indexed cycle notation; fixed points omitted, identity printed as `()`.
    pub fn to_cycle_string(&self) -> String {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.images[start] as usize == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut pt = start;
            let mut first = true;
            while !seen[pt] {
                seen[pt] = true;
                if !first {
                    out.push(' ');
                }
                first = false;
                out.push_str(&(pt + 1).to_string());
                pt = self.images[pt] as usize;
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[{}]{}", self.degree(), self.to_cycle_string())
    }
}

fn to_point(n: u64, degree: usize) -> Result<u32, PermError> {
    if n == 0 || n > degree as u64 {
        return Err(PermError::ImageOutOfRange {
            image: n as usize,
            degree,
        });
    }
    Ok((n - 1) as u32)
}

/// A cycle type: partition of the degree, parts sorted in decreasing order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CycleType {
    parts: Vec<u32>,
}

impl CycleType {
    pub fn new(mut parts: Vec<u32>) -> Result<CycleType, PermError> {
        if parts.contains(&0) {
            return Err(PermError::ZeroCyclePart);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn degree(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// Index: degree minus number of cycles.
    pub fn ind(&self) -> u64 {
        self.degree() - self.parts.len() as u64
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.iter().all(|&p| p == 1)
    }

    /// Cycle type of the c-th power of a permutation with this cycle type:
    /// each part L splits into gcd(L, c) parts of length L / gcd(L, c).
    pub fn power(&self, c: u64) -> CycleType {
        let mut parts = Vec::new();
        for &l in &self.parts {
            let g = num_integer::gcd(l as u64, c) as u32;
            for _ in 0..g {
                parts.push(l / g);
            }
        }
        CycleType::new(parts).unwrap()
    }

    /// Least common multiple of the parts: the order of any permutation with
    /// this cycle type.
    pub fn order(&self) -> u64 {
        self.parts.iter().fold(1u64, |acc, &l| num_integer::lcm(acc, l as u64))
    }

    /// Compact text form `3+1` (parts joined by `+`), used in CSV ramification fields.
    pub fn to_compact_string(&self) -> String {
        self.parts
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn parse_compact(text: &str) -> Result<CycleType, PermError> {
        let parts = text
            .split('+')
            .map(|tok| tok.trim().parse::<u32>().map_err(|_| PermError::BadCycleSyntax(text.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        CycleType::new(parts)
    }
}

impl fmt::Debug for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_compact_string())
    }
}

/// Embeds the pair (s, t) into the symmetric group on pairs, point (i, j) stored as i*m + j.
pub fn product_embed(s: &Perm, t: &Perm) -> Perm {
    let m = t.degree() as u32;
    let mut images = Vec::with_capacity(s.degree() * t.degree());
    for i in 0..s.degree() as u32 {
        let si = s.apply(i);
        for j in 0..m {
            images.push(si * m + t.apply(j));
        }
    }
    Perm { images }
}

/// Index of `product_embed(s, t)` computed from the two cycle types:
/// nm minus the sum of gcd(|c|, |d|) over all cycle pairs.
pub fn product_ind(ct1: &CycleType, ct2: &CycleType) -> u64 {
    let n = ct1.degree();
    let m = ct2.degree();
    let mut gcd_sum = 0u64;
    for &c in ct1.parts() {
        for &d in ct2.parts() {
            gcd_sum += num_integer::gcd(c as u64, d as u64);
        }
    }
    n * m - gcd_sum
}

/// One conjugacy class of an explicitly generated permutation group.
#[derive(Clone, Debug)]
pub struct ConjClass {
    pub rep: Perm,
    pub size: usize,
    pub index: u64,
}

/// Conjugacy classes of a generated group, plus the group order.
#[derive(Clone, Debug)]
pub struct ConjClassSet {
    pub classes: Vec<ConjClass>,
    pub group_order: usize,
}

impl ConjClassSet {
    /// Smallest index over the non-identity classes.
    pub fn min_nonidentity_index(&self) -> Option<u64> {
        self.classes
            .iter()
            .filter(|c| !c.rep.is_identity())
            .map(|c| c.index)
            .min()
    }
}

/// A finite permutation group materialized by closure from generators.
pub struct PermGroup {
    elements: Vec<Perm>,
    position: HashMap<Perm, usize>,
    class_of: Vec<usize>,
    classes: ConjClassSet,
}

impl PermGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn classes(&self) -> &ConjClassSet {
        &self.classes
    }

    pub fn class_index_of(&self, p: &Perm) -> Option<usize> {
        self.position.get(p).map(|&i| self.class_of[i])
    }

    /// Orbits of the conjugacy classes under [g] -> [g^c] for all c coprime to the
    /// group order; each orbit is a sorted list of class indices.
    ///
    /// The class of g^c depends only on c modulo the order of g, and every residue
    /// coprime to ord(g) lifts to an exponent coprime to the group order, so the
    /// scan runs over (Z/ord(g))^* per class.
    pub fn power_action_orbits(&self) -> Vec<Vec<usize>> {
        let k = self.classes.classes.len();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let root = find(parent, parent[i]);
                parent[i] = root;
            }
            parent[i]
        }
        for ci in 0..k {
            let rep = self.classes.classes[ci].rep.clone();
            let e = rep.order();
            for c in 2..e {
                if num_integer::gcd(c, e) != 1 {
                    continue;
                }
                let img = rep.pow(c);
                let cj = self.class_index_of(&img).expect("power stays in the group");
                let (a, b) = (find(&mut parent, ci), find(&mut parent, cj));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let mut orbits: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..k {
            let root = find(&mut parent, i);
            orbits.entry(root).or_default().push(i);
        }
        let mut out: Vec<Vec<usize>> = orbits.into_values().collect();
        for orbit in &mut out {
            orbit.sort_unstable();
        }
        out.sort();
        out
    }
}

/// Closes the generators under composition and partitions the result into
/// conjugacy classes. Fails if the group would exceed `cap` elements.
pub fn generate_group(generators: &[Perm], cap: usize) -> Result<PermGroup, PermError> {
    if generators.is_empty() {
        return Err(PermError::NoGenerators);
    }
    let degree = generators[0].degree();
    if generators.iter().any(|g| g.degree() != degree) {
        return Err(PermError::MixedDegrees);
    }

    let mut elements = vec![Perm::identity(degree)];
    let mut position = HashMap::new();
    position.insert(elements[0].clone(), 0usize);
    let mut frontier = vec![0usize];
    while let Some(i) = frontier.pop() {
        let base = elements[i].clone();
        for gen in generators {
            let next = gen.compose(&base);
            if !position.contains_key(&next) {
                if elements.len() >= cap {
                    return Err(PermError::ClosureCapExceeded { cap });
                }
                position.insert(next.clone(), elements.len());
                frontier.push(elements.len());
                elements.push(next);
            }
        }
    }

    // Conjugacy classes: orbit of each element under conjugation by the generators.
    let mut class_of = vec![usize::MAX; elements.len()];
    let mut classes = Vec::new();
    let gen_invs: Vec<Perm> = generators.iter().map(|g| g.inverse()).collect();
    for start in 0..elements.len() {
        if class_of[start] != usize::MAX {
            continue;
        }
        let class_id = classes.len();
        let mut members = vec![start];
        class_of[start] = class_id;
        let mut queue = vec![start];
        while let Some(i) = queue.pop() {
            for (gen, gen_inv) in generators.iter().zip(&gen_invs) {
                let conj = gen.compose(&elements[i]).compose(gen_inv);
                let j = position[&conj];
                if class_of[j] == usize::MAX {
                    class_of[j] = class_id;
                    members.push(j);
                    queue.push(j);
                }
            }
        }
        let rep_idx = *members.iter().min().unwrap();
        classes.push(ConjClass {
            rep: elements[rep_idx].clone(),
            size: members.len(),
            index: elements[rep_idx].ind(),
        });
    }

    let group_order = elements.len();
    Ok(PermGroup {
        elements,
        position,
        class_of,
        classes: ConjClassSet {
            classes,
            group_order,
        },
    })
}

/// Generators of the symmetric group S_n in its natural action.
pub fn symmetric_gens(n: usize) -> Vec<Perm> {
    assert!(n >= 1);
    if n == 1 {
        return vec![Perm::identity(1)];
    }
    let transposition = Perm::from_cycles(n, &[vec![0, 1]]).unwrap();
    let cycle = Perm::from_cycles(n, &[(0..n as u32).collect()]).unwrap();
    vec![transposition, cycle]
}

/// All cycle types of S_n (partitions of n), in decreasing lexicographic order.
pub fn cycle_types_of_sn(n: u32) -> Vec<CycleType> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<CycleType>) {
        if remaining == 0 {
            out.push(CycleType::new(current.clone()).unwrap());
            return;
        }
        let top = remaining.min(max_part);
        for part in (1..=top).rev() {
            current.push(part);
            rec(remaining - part, part, current, out);
            current.pop();
        }
    }
    rec(n, n, &mut current, &mut out);
    out
}

/// A permutation of S_n with the given cycle type, cycles laid out consecutively.
pub fn perm_with_cycle_type(ct: &CycleType) -> Perm {
    let mut cycles = Vec::new();
    let mut next = 0u32;
    for &len in ct.parts() {
        cycles.push((next..next + len).collect::<Vec<u32>>());
        next += len;
    }
    Perm::from_cycles(ct.degree() as usize, &cycles).unwrap()
}
