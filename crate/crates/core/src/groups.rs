//! Concrete countable amenable groups with left-invariant metrics, Følner
//! sequences, and exact set diagnostics.
//!
//! Three families are supported:
//!
//! * `Z^d` lattices with the Chebyshev (L∞) word metric, so that metric balls
//!   coincide with the canonical box Følner sets;
//! * the finitary symmetric group (permutations of ℕ moving finitely many
//!   points) with the word metric w.r.t. transpositions;
//! * the semidirect product `Z² ⋊ D₄` (shifts composed with the 8-element
//!   square point group) with the product metric
//!   `max(‖shift‖∞, 1{rotation ≠ id})`.
//!
//! All set quantities (Følner ratios, tempered constants, boundary ratios)
//! are computed by exact enumeration over hash sets of canonically encoded
//! elements.

use std::collections::HashSet;

use crate::rng::KeyedRng;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// A group element in one of the supported families.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    /// Lattice translation.
    Lattice(Vec<i64>),
    /// Finite-support permutation: `images[i]` is the image of `i` (0-based),
    /// trimmed so the last entry is actually moved.
    Perm(Vec<usize>),
    /// Shift plus point-group index `rot ∈ 0..8`.
    Dihedral { shift: [i64; 2], rot: u8 },
}

/// Applies point-group element `k` (0..8) to a lattice vector. Indices 0..4
/// are counterclockwise rotations by 90°·k; indices 4..8 compose the same
/// rotations with the reflection `(x, y) ↦ (x, −y)` (reflection first).
pub fn d4_apply(k: u8, v: [i64; 2]) -> [i64; 2] {
    let [x, y] = if k >= 4 { [v[0], -v[1]] } else { v };
    match k % 4 {
        0 => [x, y],
        1 => [-y, x],
        2 => [-x, -y],
        _ => [y, -x],
    }
}

/// Composition table: `d4_compose(a, b)` applies `b` first, then `a`.
pub fn d4_compose(a: u8, b: u8) -> u8 {
    // Work out the image of the two basis vectors and look the result up.
    let e1 = d4_apply(a, d4_apply(b, [1, 0]));
    let e2 = d4_apply(a, d4_apply(b, [0, 1]));
    for k in 0..8 {
        if d4_apply(k, [1, 0]) == e1 && d4_apply(k, [0, 1]) == e2 {
            return k;
        }
    }
    unreachable!("D4 is closed under composition")
}

pub fn d4_inverse(k: u8) -> u8 {
    for j in 0..8 {
        if d4_compose(k, j) == 0 {
            return j;
        }
    }
    unreachable!("every D4 element has an inverse")
}

fn perm_image(images: &[usize], i: usize) -> usize {
    if i < images.len() {
        images[i]
    } else {
        i
    }
}

/// Drops trailing fixed points so equal permutations compare equal.
fn perm_trim(mut images: Vec<usize>) -> Vec<usize> {
    while let Some(&last) = images.last() {
        if last == images.len() - 1 {
            images.pop();
        } else {
            break;
        }
    }
    images
}

/// Transposition count of a permutation: (#moved points) − (#cycles on them).
/// This is the word length w.r.t. the set of all transpositions.
fn perm_transposition_count(images: &[usize]) -> usize {
    let n = images.len();
    let mut seen = vec![false; n];
    let mut moved = 0usize;
    let mut cycles = 0usize;
    for start in 0..n {
        if seen[start] || perm_image(images, start) == start {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            moved += 1;
            i = perm_image(images, i);
        }
    }
    moved - cycles
}

// ---------------------------------------------------------------------------
// Group descriptors
// ---------------------------------------------------------------------------

/// Group family tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupFamily {
    /// `Z^d` under addition.
    Lattice { dim: usize },
    /// Finitary symmetric group.
    SymInf,
    /// `Z² ⋊ D₄`.
    LatticeDihedral,
}

/// Enumeration limits. Balls and Følner sets are refused beyond these sizes.
#[derive(Clone, Copy, Debug)]
pub struct SizeCaps {
    /// Maximum number of elements a single enumerated set may hold.
    pub ball_cap: usize,
    /// Largest `n` for which `S_n` is enumerated.
    pub sym_support: usize,
}

impl Default for SizeCaps {
    fn default() -> Self {
        SizeCaps { ball_cap: 4_000_000, sym_support: 8 }
    }
}

/// A countable group with composition, inverse, a left-invariant metric and
/// ball enumeration. Immutable after construction; safe to share.
#[derive(Clone, Debug)]
pub struct GroupDescriptor {
    pub family: GroupFamily,
    pub caps: SizeCaps,
}

impl GroupDescriptor {
    pub fn lattice(dim: usize) -> Self {
        assert!(dim >= 1, "lattice dimension must be positive");
        GroupDescriptor { family: GroupFamily::Lattice { dim }, caps: SizeCaps::default() }
    }

    pub fn sym_inf() -> Self {
        GroupDescriptor { family: GroupFamily::SymInf, caps: SizeCaps::default() }
    }

    pub fn lattice_dihedral() -> Self {
        GroupDescriptor { family: GroupFamily::LatticeDihedral, caps: SizeCaps::default() }
    }

    pub fn identity(&self) -> Element {
        match self.family {
            GroupFamily::Lattice { dim } => Element::Lattice(vec![0; dim]),
            GroupFamily::SymInf => Element::Perm(Vec::new()),
            GroupFamily::LatticeDihedral => Element::Dihedral { shift: [0, 0], rot: 0 },
        }
    }

    /// Group composition (left action convention: `compose(a, b)` applies `b`
    /// first, then `a`).
    pub fn compose(&self, a: &Element, b: &Element) -> Element {
        match (a, b) {
            (Element::Lattice(x), Element::Lattice(y)) => {
                Element::Lattice(x.iter().zip(y).map(|(u, v)| u + v).collect())
            }
            (Element::Perm(p), Element::Perm(q)) => {
                let n = p.len().max(q.len());
                let images = (0..n).map(|i| perm_image(p, perm_image(q, i))).collect();
                Element::Perm(perm_trim(images))
            }
            (
                Element::Dihedral { shift: z1, rot: r1 },
                Element::Dihedral { shift: z2, rot: r2 },
            ) => {
                let tz = d4_apply(*r1, *z2);
                Element::Dihedral {
                    shift: [z1[0] + tz[0], z1[1] + tz[1]],
                    rot: d4_compose(*r1, *r2),
                }
            }
            _ => panic!("elements from different group families"),
        }
    }

    pub fn inverse(&self, a: &Element) -> Element {
        match a {
            Element::Lattice(x) => Element::Lattice(x.iter().map(|v| -v).collect()),
            Element::Perm(p) => {
                let mut inv = vec![0usize; p.len()];
                for (i, &j) in p.iter().enumerate() {
                    inv[j] = i;
                }
                Element::Perm(perm_trim(inv))
            }
            Element::Dihedral { shift, rot } => {
                let ir = d4_inverse(*rot);
                let s = d4_apply(ir, *shift);
                Element::Dihedral { shift: [-s[0], -s[1]], rot: ir }
            }
        }
    }

    /// Left-invariant metric `d(a, b) = ρ(a⁻¹b)`.
    pub fn metric(&self, a: &Element, b: &Element) -> u64 {
        let g = self.compose(&self.inverse(a), b);
        self.norm(&g)
    }

    /// Distance to the identity.
    pub fn norm(&self, g: &Element) -> u64 {
        match g {
            Element::Lattice(x) => x.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0),
            Element::Perm(p) => perm_transposition_count(p) as u64,
            Element::Dihedral { shift, rot } => {
                let lat = shift[0].unsigned_abs().max(shift[1].unsigned_abs());
                lat.max(u64::from(*rot != 0))
            }
        }
    }

    /// Canonical log encoding of an element.
    pub fn encode(&self, g: &Element) -> String {
        match g {
            Element::Lattice(x) => {
                let coords: Vec<String> = x.iter().map(|v| v.to_string()).collect();
                format!("z:({})", coords.join(","))
            }
            Element::Perm(p) => {
                // Images of 1..support in one-based convention.
                let imgs: Vec<String> = p.iter().map(|&v| (v + 1).to_string()).collect();
                format!("p:[{}]", imgs.join(","))
            }
            Element::Dihedral { shift, rot } => format!("dh:({},{})|{}", shift[0], shift[1], rot),
        }
    }

    /// Exact metric ball `{φ : d(φ, e) ≤ r}`.
    pub fn ball(&self, r: u64) -> Result<Vec<Element>> {
        match self.family {
            GroupFamily::Lattice { dim } => {
                let side = 2 * r + 1;
                let count = side.checked_pow(dim as u32).ok_or(Error::UnsupportedRadius {
                    radius: r,
                    cap: self.caps.ball_cap,
                })?;
                if count as usize > self.caps.ball_cap {
                    return Err(Error::UnsupportedRadius { radius: r, cap: self.caps.ball_cap });
                }
                Ok(enumerate_box(dim, r as i64).map(Element::Lattice).collect())
            }
            GroupFamily::LatticeDihedral => {
                if r == 0 {
                    return Ok(vec![self.identity()]);
                }
                let side = 2 * r + 1;
                let count = (side * side) as usize * 8;
                if count > self.caps.ball_cap {
                    return Err(Error::UnsupportedRadius { radius: r, cap: self.caps.ball_cap });
                }
                let mut out = Vec::with_capacity(count);
                for v in enumerate_box(2, r as i64) {
                    for rot in 0..8u8 {
                        out.push(Element::Dihedral { shift: [v[0], v[1]], rot });
                    }
                }
                Ok(out)
            }
            GroupFamily::SymInf => {
                // Balls of the transposition word metric are infinite; we
                // enumerate the trace on permutations of the configured
                // support only.
                let support = self.caps.sym_support;
                let all = enumerate_permutations(support)?;
                Ok(all
                    .into_iter()
                    .filter(|p| perm_transposition_count(p) as u64 <= r)
                    .map(|p| Element::Perm(perm_trim(p)))
                    .collect())
            }
        }
    }

    /// Reported growth-regularity ratio `|B_{n+1}∖B_n| / |B_n∖B_{n−1}|`.
    /// Diagnostic only; no threshold is imposed.
    pub fn metric_condition_ratio(&self, n: u64) -> Result<f64> {
        assert!(n >= 1);
        let b_prev = self.ball(n - 1)?.len() as f64;
        let b_n = self.ball(n)?.len() as f64;
        let b_next = self.ball(n + 1)?.len() as f64;
        Ok((b_next - b_n) / (b_n - b_prev))
    }

    /// 1000-triple randomized group-axiom check; panics on violation.
    /// Used by tests; exposed so the CLI self-check can run it too.
    pub fn check_axioms(&self, seed: u64, triples: usize) {
        let mut rng = KeyedRng::from_key(seed, &[0xa210]);
        for _ in 0..triples {
            let a = self.random_element(&mut rng);
            let b = self.random_element(&mut rng);
            let c = self.random_element(&mut rng);
            let ab_c = self.compose(&self.compose(&a, &b), &c);
            let a_bc = self.compose(&a, &self.compose(&b, &c));
            assert_eq!(ab_c, a_bc, "associativity");
            assert_eq!(self.compose(&a, &self.inverse(&a)), self.identity(), "inverse");
            assert_eq!(self.compose(&self.identity(), &a), a, "identity");
            // Left invariance of the metric.
            let d_ab = self.metric(&a, &b);
            let ga = self.compose(&c, &a);
            let gb = self.compose(&c, &b);
            assert_eq!(self.metric(&ga, &gb), d_ab, "left invariance");
        }
    }

    fn random_element(&self, rng: &mut KeyedRng) -> Element {
        match self.family {
            GroupFamily::Lattice { dim } => {
                Element::Lattice((0..dim).map(|_| rng.below(21) as i64 - 10).collect())
            }
            GroupFamily::SymInf => {
                let mut images: Vec<usize> = (0..6).collect();
                rng.shuffle(&mut images);
                Element::Perm(perm_trim(images))
            }
            GroupFamily::LatticeDihedral => Element::Dihedral {
                shift: [rng.below(21) as i64 - 10, rng.below(21) as i64 - 10],
                rot: rng.below(8) as u8,
            },
        }
    }
}

fn enumerate_box(dim: usize, r: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * r + 1) as usize;
    let total = side.pow(dim as u32);
    (0..total).map(move |mut idx| {
        let mut v = vec![0i64; dim];
        for coord in v.iter_mut().rev() {
            *coord = (idx % side) as i64 - r;
            idx /= side;
        }
        v
    })
}

/// All permutations of `0..n` (Heap's algorithm), refused above the support cap.
fn enumerate_permutations(n: usize) -> Result<Vec<Vec<usize>>> {
    if n > 8 {
        return Err(Error::SizeCapExceeded { requested: n, cap: 8 });
    }
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    heap_permute(&mut items, n, &mut out);
    Ok(out)
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

// ---------------------------------------------------------------------------
// Følner sequences
// ---------------------------------------------------------------------------

/// The canonical tempered Følner sequence of a group: boxes `B_n` for
/// lattices (times the point group for `Z² ⋊ D₄`), and `S_n` for the
/// finitary symmetric group. All sequences here are nested.
#[derive(Clone, Debug)]
pub struct FolnerSequence {
    pub group: GroupDescriptor,
}

impl FolnerSequence {
    pub fn new(group: GroupDescriptor) -> Self {
        FolnerSequence { group }
    }

    /// The set `A_n`.
    pub fn set(&self, n: u64) -> Result<Vec<Element>> {
        assert!(n >= 1, "Folner index must be positive");
        match self.group.family {
            GroupFamily::Lattice { .. } | GroupFamily::LatticeDihedral => self.group.ball(n),
            GroupFamily::SymInf => {
                if n as usize > self.group.caps.sym_support {
                    return Err(Error::SizeCapExceeded {
                        requested: n as usize,
                        cap: self.group.caps.sym_support,
                    });
                }
                Ok(enumerate_permutations(n as usize)?
                    .into_iter()
                    .map(|p| Element::Perm(perm_trim(p)))
                    .collect())
            }
        }
    }

    pub fn size(&self, n: u64) -> Result<usize> {
        Ok(self.set(n)?.len())
    }

    /// `|A_n ∩ φA_n| / |A_n|` by exact set intersection.
    pub fn folner_ratio(&self, n: u64, phi: &Element) -> Result<f64> {
        let a_n = self.set(n)?;
        let translated: HashSet<Element> =
            a_n.iter().map(|g| self.group.compose(phi, g)).collect();
        let hits = a_n.iter().filter(|g| translated.contains(*g)).count();
        Ok(hits as f64 / a_n.len() as f64)
    }

    /// `|∪_{k<n} A_k⁻¹ A_n| / |A_n|` by exact enumeration. Consecutive
    /// subset inclusions are detected so nested sequences only enumerate the
    /// dominating term `A_{n−1}⁻¹A_n`; the union over all `k` is recovered
    /// otherwise.
    pub fn tempered_constant(&self, n: u64) -> Result<f64> {
        assert!(n >= 2, "tempered constant needs n >= 2");
        let a_n = self.set(n)?;
        let mut union: HashSet<Element> = HashSet::new();
        let mut covered: Option<HashSet<Element>> = None;
        for k in (1..n).rev() {
            let a_k: HashSet<Element> = self.set(k)?.into_iter().collect();
            if let Some(prev) = &covered {
                if a_k.is_subset(prev) {
                    covered = Some(a_k);
                    continue;
                }
            }
            for a in &a_k {
                let inv = self.group.inverse(a);
                for b in &a_n {
                    union.insert(self.group.compose(&inv, b));
                }
            }
            covered = Some(a_k);
        }
        Ok(union.len() as f64 / a_n.len() as f64)
    }

    /// `|A_n △ B_k A_n| / |A_n|` with `B_k A_n = {φψ : φ ∈ B_k, ψ ∈ A_n}`.
    pub fn boundary_ratio(&self, n: u64, k: u64) -> Result<f64> {
        let a_n: HashSet<Element> = self.set(n)?.into_iter().collect();
        let b_k = self.group.ball(k)?;
        let mut product: HashSet<Element> = HashSet::with_capacity(a_n.len());
        for phi in &b_k {
            for psi in &a_n {
                product.insert(self.group.compose(phi, psi));
            }
        }
        let sym_diff =
            a_n.symmetric_difference(&product).count();
        Ok(sym_diff as f64 / a_n.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_examples() {
        let z1 = GroupDescriptor::lattice(1);
        let b = z1.ball(3).unwrap();
        assert_eq!(b.len(), 7);
        let got: HashSet<i64> = b
            .iter()
            .map(|e| match e {
                Element::Lattice(v) => v[0],
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(got, (-3..=3).collect());

        let z2 = GroupDescriptor::lattice(2);
        assert_eq!(z2.ball(1).unwrap().len(), 9);
        assert_eq!(z2.ball(2).unwrap().len(), 25);
        // |B_3 \ B_2| / |B_2 \ B_1| enumerated exhaustively.
        let b3 = z2.ball(3).unwrap().len() as f64;
        let b2 = z2.ball(2).unwrap().len() as f64;
        let b1 = z2.ball(1).unwrap().len() as f64;
        assert_eq!((b3 - b2) / (b2 - b1), 1.5);
        assert_eq!(z2.metric_condition_ratio(2).unwrap(), 1.5);
    }

    #[test]
    fn ball_cap_is_enforced() {
        let mut z2 = GroupDescriptor::lattice(2);
        z2.caps.ball_cap = 100;
        assert!(matches!(z2.ball(5), Err(Error::UnsupportedRadius { .. })));
    }

    #[test]
    fn folner_set_examples() {
        let z1 = FolnerSequence::new(GroupDescriptor::lattice(1));
        assert_eq!(z1.size(5).unwrap(), 11);
        let sym = FolnerSequence::new(GroupDescriptor::sym_inf());
        assert_eq!(sym.size(3).unwrap(), 6);
        let z2 = FolnerSequence::new(GroupDescriptor::lattice(2));
        assert_eq!(z2.size(2).unwrap(), 25);
        assert!(matches!(sym.set(9), Err(Error::SizeCapExceeded { .. })));
    }

    #[test]
    fn folner_ratio_examples() {
        let z1 = FolnerSequence::new(GroupDescriptor::lattice(1));
        let shift2 = Element::Lattice(vec![2]);
        assert_eq!(z1.folner_ratio(5, &shift2).unwrap(), 9.0 / 11.0);
        let id = Element::Lattice(vec![0]);
        assert_eq!(z1.folner_ratio(5, &id).unwrap(), 1.0);

        let z2 = FolnerSequence::new(GroupDescriptor::lattice(2));
        let diag = Element::Lattice(vec![1, 1]);
        assert_eq!(z2.folner_ratio(3, &diag).unwrap(), 36.0 / 49.0);
    }

    #[test]
    fn tempered_constant_examples() {
        let z1 = FolnerSequence::new(GroupDescriptor::lattice(1));
        assert_eq!(z1.tempered_constant(3).unwrap(), 11.0 / 7.0);
        assert_eq!(z1.tempered_constant(2).unwrap(), 7.0 / 5.0);
        let z2 = FolnerSequence::new(GroupDescriptor::lattice(2));
        assert_eq!(z2.tempered_constant(2).unwrap(), 49.0 / 25.0);
    }

    #[test]
    fn tempered_union_shortcut_matches_full_union() {
        // Brute-force union over every k < n, no subset skipping.
        let seq = FolnerSequence::new(GroupDescriptor::lattice(2));
        for n in 2..=4u64 {
            let a_n = seq.set(n).unwrap();
            let mut union: HashSet<Element> = HashSet::new();
            for k in 1..n {
                for a in seq.set(k).unwrap() {
                    let inv = seq.group.inverse(&a);
                    for b in &a_n {
                        union.insert(seq.group.compose(&inv, b));
                    }
                }
            }
            let brute = union.len() as f64 / a_n.len() as f64;
            assert_eq!(seq.tempered_constant(n).unwrap(), brute);
        }
    }

    #[test]
    fn boundary_ratio_examples() {
        let z2 = FolnerSequence::new(GroupDescriptor::lattice(2));
        assert_eq!(z2.boundary_ratio(2, 1).unwrap(), 24.0 / 25.0);
        assert_eq!(z2.boundary_ratio(2, 0).unwrap(), 0.0);
        let z1 = FolnerSequence::new(GroupDescriptor::lattice(1));
        assert_eq!(z1.boundary_ratio(10, 1).unwrap(), 2.0 / 21.0);
        let sym = FolnerSequence::new(GroupDescriptor::sym_inf());
        assert_eq!(sym.boundary_ratio(4, 0).unwrap(), 0.0);
    }

    #[test]
    fn folner_ratio_tends_to_one() {
        // Nondecreasing trend and >0.95 at n=64 for small shifts, d <= 2.
        for dim in 1..=2 {
            let seq = FolnerSequence::new(GroupDescriptor::lattice(dim));
            let phi = Element::Lattice(vec![2; dim]);
            let mut last = 0.0;
            for n in [4u64, 8, 16, 32, 64] {
                let r = seq.folner_ratio(n, &phi).unwrap();
                assert!(r >= last, "ratio must be nondecreasing for n >= ||phi||");
                last = r;
            }
            assert!(last > 0.95, "dim {dim}: ratio at n=64 was {last}");
        }
    }

    #[test]
    fn tempered_constant_bounded_by_growth() {
        // Analytic bound |B_{2n-1}|/|B_n| <= 2^d for boxes.
        let z1 = FolnerSequence::new(GroupDescriptor::lattice(1));
        for n in 2..=32u64 {
            assert!(z1.tempered_constant(n).unwrap() <= 2.0 + 0.01);
        }
        let z2 = FolnerSequence::new(GroupDescriptor::lattice(2));
        for n in [2u64, 4, 8, 16, 32] {
            assert!(z2.tempered_constant(n).unwrap() <= 4.0 + 0.01);
        }
    }

    #[test]
    fn boundary_ratio_decreases_in_n() {
        let z2 = FolnerSequence::new(GroupDescriptor::lattice(2));
        let vals: Vec<f64> =
            [4u64, 8, 16, 32].iter().map(|&n| z2.boundary_ratio(n, 1).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[1] < w[0], "boundary ratio must strictly decrease: {vals:?}");
        }
    }

    #[test]
    fn group_axioms_hold_on_random_triples() {
        GroupDescriptor::lattice(1).check_axioms(101, 1000);
        GroupDescriptor::lattice(2).check_axioms(102, 1000);
        GroupDescriptor::sym_inf().check_axioms(103, 1000);
        GroupDescriptor::lattice_dihedral().check_axioms(104, 1000);
    }

    #[test]
    fn dihedral_structure() {
        let g = GroupDescriptor::lattice_dihedral();
        // Point group has order 8 and acts by isometries of the box.
        for k in 0..8u8 {
            let v = d4_apply(k, [3, -2]);
            assert_eq!(v[0].abs().max(v[1].abs()), 3);
        }
        // Ball sizes: B_0 = {e}, B_r = box * D4 for r >= 1.
        assert_eq!(g.ball(0).unwrap().len(), 1);
        assert_eq!(g.ball(1).unwrap().len(), 9 * 8);
        assert_eq!(g.ball(2).unwrap().len(), 25 * 8);
    }

    #[test]
    fn perm_metric_is_transposition_count() {
        let g = GroupDescriptor::sym_inf();
        let id = g.identity();
        let swap = Element::Perm(vec![1, 0]);
        assert_eq!(g.metric(&id, &swap), 1);
        let three_cycle = Element::Perm(vec![1, 2, 0]);
        assert_eq!(g.metric(&id, &three_cycle), 2);
        // Ball within the configured support.
        let mut small = GroupDescriptor::sym_inf();
        small.caps.sym_support = 4;
        let b1 = small.ball(1).unwrap();
        // identity + C(4,2) transpositions
        assert_eq!(b1.len(), 1 + 6);
    }

    #[test]
    fn canonical_encodings() {
        let z2 = GroupDescriptor::lattice(2);
        assert_eq!(z2.encode(&Element::Lattice(vec![3, -1])), "z:(3,-1)");
        let sym = GroupDescriptor::sym_inf();
        assert_eq!(sym.encode(&Element::Perm(vec![1, 0])), "p:[2,1]");
        let dh = GroupDescriptor::lattice_dihedral();
        assert_eq!(dh.encode(&Element::Dihedral { shift: [1, 2], rot: 5 }), "dh:(1,2)|5");
    }
}
