//! Even lattices, discriminant forms and the frame-lattice classification.
//!
//! Root lattices are negative definite (negated Cartan matrices). Values of
//! discriminant quadratic forms are kept as exact rationals in `[0, 2)` and
//! bilinear values in `[0, 1)`.

use crate::error::{K3Error, Result};
use exactalg::{smith_normal_form, IntMatrix, Ring, Q};
use num::{BigInt, Integer, Signed, ToPrimitive};
use serde::Serialize;
use std::collections::{HashMap, HashSet};
use std::fmt;

/// Brute-force bound for isomorphism tests and isotropic subgroup listing.
pub const BRUTE_FORCE_ORDER: u64 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AdeKind {
    A,
    D,
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RootType {
    pub kind: AdeKind,
    pub rank: usize,
}

impl RootType {
    pub fn new(kind: AdeKind, rank: usize) -> Result<Self> {
        let ok = match kind {
            AdeKind::A => rank >= 1,
            AdeKind::D => rank >= 4,
            AdeKind::E => (6..=8).contains(&rank),
        };
        if !ok {
            let c = match kind {
                AdeKind::A => 'A',
                AdeKind::D => 'D',
                AdeKind::E => 'E',
            };
            return Err(K3Error::BadRank(rank, c));
        }
        Ok(RootType { kind, rank })
    }

    pub fn a(n: usize) -> Self {
        RootType::new(AdeKind::A, n).unwrap()
    }

    pub fn d(n: usize) -> Self {
        RootType::new(AdeKind::D, n).unwrap()
    }

    pub fn e(n: usize) -> Self {
        RootType::new(AdeKind::E, n).unwrap()
    }

    /// |det| of the Cartan matrix.
    pub fn det_abs(&self) -> u64 {
        match self.kind {
            AdeKind::A => self.rank as u64 + 1,
            AdeKind::D => 4,
            AdeKind::E => 9 - self.rank as u64,
        }
    }

    /// Positive definite Cartan matrix. D_n: chain 1..n-1, node n on n-2.
    /// E_n: Bourbaki labelling, chain 1-3-4-5-..-n, node 2 on node 4.
    pub fn cartan(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut c = vec![vec![0i64; n]; n];
        for (i, row) in c.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut edge = |i: usize, j: usize| {
            c[i][j] = -1;
            c[j][i] = -1;
        };
        match self.kind {
            AdeKind::A => (0..n - 1).for_each(|i| edge(i, i + 1)),
            AdeKind::D => {
                (0..n - 2).for_each(|i| edge(i, i + 1));
                edge(n - 3, n - 1);
            }
            AdeKind::E => {
                edge(0, 2);
                edge(1, 3);
                (2..n - 1).for_each(|i| edge(i, i + 1));
            }
        }
        c
    }

    pub fn num_roots(&self) -> usize {
        let n = self.rank;
        match self.kind {
            AdeKind::A => n * (n + 1),
            AdeKind::D => 2 * n * (n - 1),
            AdeKind::E => [72, 126, 240][n - 6],
        }
    }
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            AdeKind::A => "A",
            AdeKind::D => "D",
            AdeKind::E => "E",
        };
        write!(f, "{k}{}", self.rank)
    }
}

/// `"D12+A1+A1"`, sorted largest first.
pub fn root_label(roots: &[RootType]) -> String {
    if roots.is_empty() {
        return "0".into();
    }
    let mut v = roots.to_vec();
    sort_roots(&mut v);
    v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("+")
}

/// Canonical order: E before D before A, larger rank first.
pub fn sort_roots(v: &mut [RootType]) {
    v.sort_by(|a, b| b.kind.cmp(&a.kind).then(b.rank.cmp(&a.rank)));
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    gram: IntMatrix,
    labels: Vec<String>,
}

impl Lattice {
    pub fn new(gram: IntMatrix, labels: Vec<String>) -> Result<Self> {
        if !gram.is_symmetric() || labels.len() != gram.rows() {
            return Err(K3Error::Degenerate);
        }
        if (0..gram.rows()).any(|i| gram[(i, i)].is_odd()) {
            return Err(K3Error::Parse("odd diagonal entry in an even lattice".into()));
        }
        Ok(Lattice { gram, labels })
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn det(&self) -> BigInt {
        if self.rank() == 0 {
            return BigInt::from(1);
        }
        self.gram.det()
    }
}

/// Negative definite root lattice of the given type.
pub fn ade_lattice(kind: AdeKind, n: usize) -> Result<Lattice> {
    let rt = RootType::new(kind, n)?;
    let c = rt.cartan();
    let neg: Vec<Vec<i64>> = c.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    let labels = (1..=n).map(|i| format!("{rt}.{i}")).collect();
    Lattice::new(IntMatrix::from_rows(&neg), labels)
}

pub fn root_lattice(rt: RootType) -> Lattice {
    ade_lattice(rt.kind, rt.rank).unwrap()
}

pub fn hyperbolic() -> Lattice {
    Lattice::new(IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]), vec!["H.e".into(), "H.f".into()]).unwrap()
}

pub fn direct_sum(a: &Lattice, b: &Lattice) -> Lattice {
    let gram = IntMatrix::direct_sum(&[a.gram.clone(), b.gram.clone()]);
    let labels = a.labels.iter().chain(&b.labels).cloned().collect();
    Lattice { gram, labels }
}

pub fn direct_sum_all(parts: &[Lattice]) -> Lattice {
    let gram = IntMatrix::direct_sum(&parts.iter().map(|l| l.gram.clone()).collect::<Vec<_>>());
    let labels = parts.iter().flat_map(|l| l.labels.iter().cloned()).collect();
    Lattice { gram, labels }
}

/// Parsed lattice expression: hyperbolic planes plus root summands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    pub hyperbolic: usize,
    pub roots: Vec<RootType>,
}

impl LatticeSpec {
    pub fn lattice(&self) -> Lattice {
        let mut parts = vec![hyperbolic(); self.hyperbolic];
        parts.extend(self.roots.iter().map(|&r| root_lattice(r)));
        direct_sum_all(&parts)
    }
}

/// Parses `"H+E8+D6"`, `"D12+2A1"`, `"E7(-1)+E7(-1)"`.
pub fn parse_lattice_spec(s: &str) -> Result<LatticeSpec> {
    let mut spec = LatticeSpec {
        hyperbolic: 0,
        roots: vec![],
    };
    for tok in s.split(['+', '⊕']) {
        let tok = tok.trim().trim_end_matches("(-1)").trim_end_matches("(−1)");
        if tok.is_empty() {
            return Err(K3Error::Parse(format!("empty summand in {s:?}")));
        }
        let digits = tok.chars().take_while(|c| c.is_ascii_digit()).count();
        let mult: usize = if digits == 0 { 1 } else { tok[..digits].parse().unwrap() };
        let body = &tok[digits..];
        if body == "H" || body == "U" {
            spec.hyperbolic += mult;
            continue;
        }
        let mut chars = body.chars();
        let kind = match chars.next() {
            Some('A') => AdeKind::A,
            Some('D') => AdeKind::D,
            Some('E') => AdeKind::E,
            _ => return Err(K3Error::Parse(format!("unknown summand {tok:?}"))),
        };
        let n: usize = chars
            .as_str()
            .parse()
            .map_err(|_| K3Error::Parse(format!("bad rank in {tok:?}")))?;
        let rt = RootType::new(kind, n)?;
        spec.roots.extend(std::iter::repeat(rt).take(mult));
    }
    Ok(spec)
}

fn mod_n(x: &Q, n: i64) -> Q {
    let n = Q::from_integer(n.into());
    let k = (x / &n).floor();
    x - &(k * n)
}

fn mod2(x: &Q) -> Q {
    mod_n(x, 2)
}

fn mod1(x: &Q) -> Q {
    mod_n(x, 1)
}

/// Finite quadratic form on `⊕ Z/o_i` given by its values on generators.
///
/// `gram[i][i] = q(g_i)` mod 2 and `gram[i][j] = b(g_i, g_j)` mod 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuadraticForm {
    orders: Vec<u64>,
    gram: Vec<Vec<Q>>,
    // gram scaled by a common denominator, for fast evaluation
    den: i64,
    igram: Vec<Vec<i64>>,
}

impl FiniteQuadraticForm {
    /// Drops generators of order one and reduces the entries.
    pub fn new(orders: Vec<u64>, gram: Vec<Vec<Q>>) -> Self {
        let keep: Vec<usize> = (0..orders.len()).filter(|&i| orders[i] > 1).collect();
        let gram: Vec<Vec<Q>> = keep
            .iter()
            .map(|&i| {
                keep.iter()
                    .map(|&j| if i == j { mod2(&gram[i][j]) } else { mod1(&gram[i][j]) })
                    .collect()
            })
            .collect();
        Self::from_reduced(keep.iter().map(|&i| orders[i]).collect(), gram)
    }

    fn from_reduced(orders: Vec<u64>, gram: Vec<Vec<Q>>) -> Self {
        let den = gram
            .iter()
            .flatten()
            .fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
        let den = den.to_i64().expect("denominator fits in i64");
        let dq = Q::from_integer(den.into());
        let igram = gram
            .iter()
            .map(|row| row.iter().map(|x| (x * &dq).to_integer().to_i64().unwrap()).collect())
            .collect();
        FiniteQuadraticForm {
            orders,
            gram,
            den,
            igram,
        }
    }

    pub fn trivial() -> Self {
        Self::from_reduced(vec![], vec![])
    }

    /// The form `(Z/2)^2` with `q = (1/2, 1/2)` on the standard generators.
    pub fn target() -> Self {
        let h = exactalg::q(1, 2);
        Self::new(vec![2, 2], vec![vec![h.clone(), Q::zero()], vec![Q::zero(), h]])
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn gram(&self) -> &[Vec<Q>] {
        &self.gram
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn ngens(&self) -> usize {
        self.orders.len()
    }

    pub fn reduce(&self, x: &[i64]) -> Vec<i64> {
        x.iter().zip(&self.orders).map(|(a, &o)| a.rem_euclid(o as i64)).collect()
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let s: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.reduce(&s)
    }

    pub fn neg(&self, x: &[i64]) -> Vec<i64> {
        let s: Vec<i64> = x.iter().map(|a| -a).collect();
        self.reduce(&s)
    }

    /// `q(x)` scaled by `den`, reduced mod `2 den`.
    fn q_int(&self, x: &[i64]) -> i64 {
        let m = 2 * self.den;
        let mut acc = 0i64;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            acc = (acc + self.igram[i][i] * (x[i] * x[i] % m)) % m;
            for j in i + 1..x.len() {
                acc = (acc + 2 * self.igram[i][j] * (x[i] * x[j] % m)) % m;
            }
        }
        acc.rem_euclid(m)
    }

    /// `b(x, y)` scaled by `den`, reduced mod `den`.
    fn b_int(&self, x: &[i64], y: &[i64]) -> i64 {
        let m = self.den;
        let mut acc = 0i64;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            for j in 0..y.len() {
                acc = (acc + self.igram[i][j] * (x[i] * y[j] % m)) % m;
            }
        }
        acc.rem_euclid(m)
    }

    pub fn q(&self, x: &[i64]) -> Q {
        Q::new(self.q_int(x).into(), self.den.into())
    }

    pub fn b(&self, x: &[i64], y: &[i64]) -> Q {
        Q::new(self.b_int(x, y).into(), self.den.into())
    }

    pub fn q_is_zero(&self, x: &[i64]) -> bool {
        self.q_int(x) == 0
    }

    pub fn b_is_zero(&self, x: &[i64], y: &[i64]) -> bool {
        self.b_int(x, y) == 0
    }

    /// All elements in mixed-radix order (first coordinate fastest).
    pub fn elements(&self) -> Vec<Vec<i64>> {
        let n = self.order() as usize;
        (0..n).map(|k| self.element(k)).collect()
    }

    pub fn element(&self, mut k: usize) -> Vec<i64> {
        self.orders
            .iter()
            .map(|&o| {
                let r = (k % o as usize) as i64;
                k /= o as usize;
                r
            })
            .collect()
    }

    pub fn index_of(&self, x: &[i64]) -> usize {
        let mut k = 0usize;
        let mut m = 1usize;
        for (a, &o) in x.iter().zip(&self.orders) {
            k += a.rem_euclid(o as i64) as usize * m;
            m *= o as usize;
        }
        k
    }

    pub fn element_order(&self, x: &[i64]) -> u64 {
        x.iter()
            .zip(&self.orders)
            .map(|(&a, &o)| o / (a.rem_euclid(o as i64) as u64).gcd(&o))
            .fold(1, |acc, d| acc.lcm(&d))
    }

    pub fn orthogonal_sum(&self, o: &Self) -> Self {
        let n = self.ngens() + o.ngens();
        let mut gram = vec![vec![Q::zero(); n]; n];
        for i in 0..self.ngens() {
            for j in 0..self.ngens() {
                gram[i][j] = self.gram[i][j].clone();
            }
        }
        let k = self.ngens();
        for i in 0..o.ngens() {
            for j in 0..o.ngens() {
                gram[k + i][k + j] = o.gram[i][j].clone();
            }
        }
        let orders = self.orders.iter().chain(&o.orders).copied().collect();
        Self::from_reduced(orders, gram)
    }

    /// Elementary divisors (prime powers), sorted.
    pub fn elementary_divisors(&self) -> Vec<u64> {
        let mut out = vec![];
        for &o in &self.orders {
            out.extend(prime_power_factors(o));
        }
        out.sort();
        out
    }

    /// `"0"`, `"Z2^2"`, `"Z4"`, `"Z2 x Z3"`.
    pub fn group_label(&self) -> String {
        group_label(&self.elementary_divisors())
    }

    /// Sorted q-values of the nonzero elements, for display.
    pub fn value_multiset(&self) -> Vec<Q> {
        let mut v: Vec<Q> = self.elements().iter().skip(1).map(|x| self.q(x)).collect();
        v.sort();
        v
    }

    /// Subgroup generated by `gens`, as sorted element indices.
    pub fn span(&self, gens: &[Vec<i64>]) -> Vec<usize> {
        let mut seen: HashSet<usize> = HashSet::new();
        let zero = vec![0i64; self.ngens()];
        let mut frontier = vec![zero.clone()];
        seen.insert(self.index_of(&zero));
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.add(&x, g);
                if seen.insert(self.index_of(&y)) {
                    frontier.push(y);
                }
            }
        }
        let mut v: Vec<usize> = seen.into_iter().collect();
        v.sort();
        v
    }

    /// A short generating set for the subgroup with the given elements.
    pub fn small_generators(&self, elems: &[usize]) -> Vec<Vec<i64>> {
        let mut gens: Vec<Vec<i64>> = vec![];
        let mut cur: HashSet<usize> = [0].into_iter().collect();
        // elements of large order first keeps the list short
        let mut order: Vec<usize> = elems.to_vec();
        order.sort_by_key(|&k| std::cmp::Reverse(self.element_order(&self.element(k))));
        for k in order {
            if cur.contains(&k) {
                continue;
            }
            gens.push(self.element(k));
            cur = self.span(&gens).into_iter().collect();
            if cur.len() == elems.len() {
                break;
            }
        }
        gens
    }
}

impl fmt::Display for FiniteQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> = (0..self.ngens()).map(|i| exactalg::ring::fmt_q(&self.gram[i][i])).collect();
        write!(f, "{} with q = ({})", self.group_label(), qs.join(", "))
    }
}

fn prime_power_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut q = 1;
            while n % p == 0 {
                n /= p;
                q *= p;
            }
            out.push(q);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn group_label(elementary_divisors: &[u64]) -> String {
    if elementary_divisors.is_empty() {
        return "0".into();
    }
    let mut counts: Vec<(u64, usize)> = vec![];
    for &d in elementary_divisors {
        match counts.last_mut() {
            Some((x, c)) if *x == d => *c += 1,
            _ => counts.push((d, 1)),
        }
    }
    counts
        .iter()
        .map(|&(d, c)| if c == 1 { format!("Z{d}") } else { format!("Z{d}^{c}") })
        .collect::<Vec<_>>()
        .join(" x ")
}

/// Discriminant form together with the generator vectors `y_i` of `L*/L`,
/// in coordinates of the lattice basis.
pub fn discriminant_data(l: &Lattice) -> Result<(FiniteQuadraticForm, Vec<Vec<Q>>)> {
    let n = l.rank();
    if n == 0 {
        return Ok((FiniteQuadraticForm::trivial(), vec![]));
    }
    let snf = smith_normal_form(l.gram());
    let d = snf.diagonal();
    if d.iter().any(|x| x.is_zero()) {
        return Err(K3Error::Degenerate);
    }
    // U G V = S, so G (V e_i / d_i) = U^{-1} e_i is integral: y_i lies in L*.
    let mut gens = vec![];
    let mut orders = vec![];
    for (i, di) in d.iter().enumerate() {
        if di.is_one() {
            continue;
        }
        let den = Q::from_integer(di.clone());
        let y: Vec<Q> = (0..n).map(|r| Q::from_integer(snf.v[(r, i)].clone()) / &den).collect();
        gens.push(y);
        orders.push(di.to_u64().expect("discriminant group order fits in u64"));
    }
    let g = l.gram();
    let k = gens.len();
    let mut gram = vec![vec![Q::zero(); k]; k];
    for i in 0..k {
        for j in 0..k {
            gram[i][j] = bilinear(g, &gens[i], &gens[j]);
        }
    }
    let form = FiniteQuadraticForm::new(orders, gram);
    Ok((form, gens))
}

pub fn discriminant_form(l: &Lattice) -> Result<FiniteQuadraticForm> {
    Ok(discriminant_data(l)?.0)
}

fn bilinear(g: &IntMatrix, x: &[Q], y: &[Q]) -> Q {
    let mut acc = Q::zero();
    for i in 0..x.len() {
        if x[i].is_zero() {
            continue;
        }
        for j in 0..y.len() {
            if !g[(i, j)].is_zero() && !y[j].is_zero() {
                acc += &x[i] * &y[j] * Q::from_integer(g[(i, j)].clone());
            }
        }
    }
    acc
}

/// Group isomorphism `a -> b` preserving q, given as images of the
/// generators of `a` in coordinates of `b`.
pub fn fqf_isomorphism(a: &FiniteQuadraticForm, b: &FiniteQuadraticForm) -> Result<Option<Vec<Vec<i64>>>> {
    for f in [a, b] {
        if f.order() > BRUTE_FORCE_ORDER {
            return Err(K3Error::TooLarge(f.order()));
        }
    }
    if a.order() != b.order() || a.elementary_divisors() != b.elementary_divisors() {
        return Ok(None);
    }
    let elems = b.elements();
    let mut images: Vec<Vec<i64>> = vec![];
    if assign_images(a, b, &elems, &mut images) {
        Ok(Some(images))
    } else {
        Ok(None)
    }
}

fn assign_images(a: &FiniteQuadraticForm, b: &FiniteQuadraticForm, elems: &[Vec<i64>], images: &mut Vec<Vec<i64>>) -> bool {
    let i = images.len();
    if i == a.ngens() {
        return b.span(images).len() as u64 == b.order();
    }
    let ord = a.orders[i];
    let qi = &a.gram[i][i];
    for h in elems {
        if b.element_order(h) != ord || &b.q(h) != qi {
            continue;
        }
        if (0..i).any(|j| b.b(h, &images[j]) != a.gram[i][j]) {
            continue;
        }
        images.push(h.clone());
        if assign_images(a, b, elems, images) {
            return true;
        }
        images.pop();
    }
    false
}

pub fn fqf_isomorphic(a: &FiniteQuadraticForm, b: &FiniteQuadraticForm) -> Result<bool> {
    Ok(fqf_isomorphism(a, b)?.is_some())
}

/// All isotropic subgroups (including the trivial one), as sorted element
/// index lists.
pub fn isotropic_subgroups(f: &FiniteQuadraticForm) -> Result<Vec<Vec<usize>>> {
    if f.order() > BRUTE_FORCE_ORDER {
        return Err(K3Error::TooLarge(f.order()));
    }
    let elems = f.elements();
    let iso: Vec<usize> = (1..elems.len()).filter(|&k| f.q(&elems[k]).is_zero()).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = vec![vec![0usize]];
    seen.insert(vec![0]);
    let mut queue = vec![vec![0usize]];
    while let Some(s) = queue.pop() {
        for &x in &iso {
            if s.binary_search(&x).is_ok() {
                continue;
            }
            if s.iter().any(|&y| !f.b(&elems[x], &elems[y]).is_zero()) {
                continue;
            }
            let mut gens: Vec<Vec<i64>> = f.small_generators(&s);
            gens.push(elems[x].clone());
            let t = f.span(&gens);
            if seen.insert(t.clone()) {
                out.push(t.clone());
                queue.push(t);
            }
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    Ok(out)
}

/// Discriminant form of the overlattice glued along the isotropic subgroup
/// generated by `w`, that is the induced form on `W^perp / W`.
pub fn overlattice_form(f: &FiniteQuadraticForm, w: &[Vec<i64>]) -> Result<FiniteQuadraticForm> {
    let welems = f.span(w);
    for &k in &welems {
        if !f.q(&f.element(k)).is_zero() {
            return Err(K3Error::NotIsotropic);
        }
    }
    if welems.len() == 1 {
        return Ok(f.clone());
    }
    let k = f.ngens();
    let wgens = f.small_generators(&welems);
    let perp: Vec<usize> = (0..f.order() as usize)
        .filter(|&i| {
            let x = f.element(i);
            wgens.iter().all(|g| f.b_is_zero(&x, g))
        })
        .collect();
    let pgens = f.small_generators(&perp);

    // Lambda1 = <perp> + diag(o) Z^k; its basis B1 = U^{-1} diag(s) from
    // the SNF U A V = S of the generator matrix A.
    let relations: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { f.orders[i] as i64 } else { 0 }).collect())
        .collect();
    let cols1: Vec<&Vec<i64>> = pgens.iter().chain(relations.iter()).collect();
    let a = IntMatrix::from_rows(&(0..k).map(|r| cols1.iter().map(|c| c[r]).collect()).collect::<Vec<_>>());
    let snf = smith_normal_form(&a);
    let s = snf.diagonal();
    let av = a.mul(&snf.v);
    let b1: Vec<Vec<BigInt>> = (0..k).map(|r| (0..k).map(|c| av[(r, c)].clone()).collect()).collect();

    // coordinates of Lambda0 = <W> + diag(o) Z^k in the basis B1
    let cols0: Vec<&Vec<i64>> = wgens.iter().chain(relations.iter()).collect();
    let mut rel = IntMatrix::zeros(k, cols0.len());
    for (c, v) in cols0.iter().enumerate() {
        for r in 0..k {
            let mut acc = BigInt::zero();
            for j in 0..k {
                acc += &snf.u[(r, j)] * BigInt::from(v[j]);
            }
            let (qt, rm) = acc.div_rem(&s[r]);
            assert!(rm.is_zero(), "W is not contained in its orthogonal complement");
            rel[(r, c)] = qt;
        }
    }
    let snf2 = smith_normal_form(&rel);
    let p_inv = snf2.u.inverse_unimodular().expect("unimodular transform");
    let s2 = snf2.diagonal();
    let mut orders = vec![];
    let mut gens: Vec<Vec<i64>> = vec![];
    for i in 0..k {
        let d = s2.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_one() {
            continue;
        }
        assert!(!d.is_zero(), "quotient is infinite");
        // generator B1 * P^{-1} e_i in ambient coordinates
        let col: Vec<BigInt> = (0..k).map(|r| p_inv[(r, i)].clone()).collect();
        let g: Vec<i64> = (0..k)
            .map(|r| {
                let mut acc = BigInt::zero();
                for j in 0..k {
                    acc += &b1[r][j] * &col[j];
                }
                acc.mod_floor(&BigInt::from(f.orders[r])).to_i64().unwrap()
            })
            .collect();
        orders.push(d.to_u64().unwrap());
        gens.push(g);
    }
    let n = gens.len();
    let mut gram = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            gram[i][j] = if i == j { f.q(&gens[i]) } else { f.b(&gens[i], &gens[j]) };
        }
    }
    Ok(FiniteQuadraticForm::new(orders, gram))
}

/// All roots of a root lattice, as integer coordinate vectors in the basis
/// of simple roots.
pub fn roots(rt: RootType) -> Vec<Vec<i64>> {
    let c = rt.cartan();
    let n = rt.rank;
    let simple: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let mut seen: HashSet<Vec<i64>> = simple.iter().cloned().collect();
    let mut frontier = simple.clone();
    while let Some(b) = frontier.pop() {
        for i in 0..n {
            // s_i(b) = b - (b, alpha_i) alpha_i
            let pair: i64 = (0..n).map(|j| b[j] * c[j][i]).sum();
            if pair == 0 {
                continue;
            }
            let mut r = b.clone();
            r[i] -= pair;
            if seen.insert(r.clone()) {
                frontier.push(r);
            }
        }
    }
    let mut all: Vec<Vec<i64>> = seen.into_iter().collect();
    let negs: Vec<Vec<i64>> = all.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    all.extend(negs);
    all.sort();
    all.dedup();
    all
}

/// Minimal positive norm in the coset `y + R` of a root lattice, found by
/// descending along roots with `(y, alpha) >= 2` until none remain.
pub fn coset_min_norm(rt: RootType, y: &[Q]) -> Q {
    let c = rt.cartan();
    let rs = roots(rt);
    let n = rt.rank;
    let mut y: Vec<Q> = y.iter().map(mod1).collect();
    let pair = |y: &[Q], r: &[i64]| -> Q {
        let mut acc = Q::zero();
        for i in 0..n {
            for j in 0..n {
                if c[i][j] != 0 && r[j] != 0 {
                    acc += &y[i] * Q::from_integer((c[i][j] * r[j]).into());
                }
            }
        }
        acc
    };
    let two = Q::from_integer(2.into());
    loop {
        let step = rs.iter().find(|r| pair(&y, r) >= two);
        match step {
            Some(r) => {
                for i in 0..n {
                    y[i] -= Q::from_integer(r[i].into());
                }
            }
            None => break,
        }
    }
    let mut acc = Q::zero();
    for i in 0..n {
        for j in 0..n {
            if c[i][j] != 0 {
                acc += &y[i] * &y[j] * Q::from_integer(c[i][j].into());
            }
        }
    }
    acc
}

/// A root summand's discriminant form with the minimal norm of every class.
#[derive(Clone, Debug)]
pub struct RootSummand {
    pub root: RootType,
    pub form: FiniteQuadraticForm,
    pub min_norms: Vec<Q>,
}

pub fn root_summand(rt: RootType) -> RootSummand {
    let (form, gens) = discriminant_data(&root_lattice(rt)).unwrap();
    let min_norms = form
        .elements()
        .iter()
        .map(|x| {
            let mut y = vec![Q::zero(); rt.rank];
            for (k, &a) in x.iter().enumerate() {
                for i in 0..rt.rank {
                    y[i] += &gens[k][i] * Q::from_integer(a.into());
                }
            }
            if x.iter().all(|&a| a == 0) {
                Q::zero()
            } else {
                coset_min_norm(rt, &y)
            }
        })
        .collect();
    RootSummand { root: rt, form, min_norms }
}

/// Orthogonal sum of root summands with per-element minimal glue norms.
struct RootSum {
    form: FiniteQuadraticForm,
    parts: Vec<RootSummand>,
}

impl RootSum {
    fn new(roots: &[RootType], cache: &mut HashMap<RootType, RootSummand>) -> Self {
        let parts: Vec<RootSummand> = roots
            .iter()
            .map(|r| cache.entry(*r).or_insert_with(|| root_summand(*r)).clone())
            .collect();
        let form = parts
            .iter()
            .fold(FiniteQuadraticForm::trivial(), |acc, p| acc.orthogonal_sum(&p.form));
        RootSum { form, parts }
    }

    fn min_norm(&self, x: &[i64]) -> Q {
        let mut off = 0;
        let mut acc = Q::zero();
        for p in &self.parts {
            let k = p.form.ngens();
            acc += &p.min_norms[p.form.index_of(&x[off..off + k])];
            off += k;
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrameResult {
    pub roots: Vec<RootType>,
    pub root_label: String,
    /// Label of `W = K / K^root`.
    pub torsion: String,
    pub torsion_order: u64,
}

/// Outcome of the frame classification together with search statistics.
#[derive(Clone, Debug, Serialize)]
pub struct FrameClassification {
    pub results: Vec<FrameResult>,
    pub multisets: usize,
    pub case_two_candidates: usize,
    /// Case II multisets discarded by the glue-code bound without search.
    pub pruned_by_code_bound: Vec<String>,
    /// Case II multisets where a gluing with the right form exists but every
    /// such gluing introduces new roots.
    pub rejected_by_root_condition: Vec<String>,
}

/// Largest dimension of a binary linear code of the given length whose
/// nonzero weights are at least 8 (Griesmer bound).
fn griesmer_dim_d8(len: usize) -> u32 {
    let mut k = 0u32;
    loop {
        let need: usize = (0..=k).map(|i| 8usize.div_ceil(1 << i)).sum();
        if need > len {
            return k;
        }
        k += 1;
    }
}

fn all_multisets(rank: usize) -> Vec<Vec<RootType>> {
    let mut types = vec![RootType::e(8), RootType::e(7), RootType::e(6)];
    types.extend((4..=rank).rev().map(RootType::d));
    types.extend((1..=rank).rev().map(RootType::a));
    let mut out = vec![];
    fn rec(types: &[RootType], i: usize, rem: usize, cur: &mut Vec<RootType>, out: &mut Vec<Vec<RootType>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for j in i..types.len() {
            if types[j].rank <= rem {
                cur.push(types[j]);
                rec(types, j, rem - types[j].rank, cur, out);
                cur.pop();
            }
        }
    }
    rec(&types, 0, rank, &mut vec![], &mut out);
    out
}

/// Searches for an isotropic subgroup of order `m` whose nonzero elements
/// all pass `allowed`, such that the glued form is isomorphic to `target`.
fn find_glue(
    f: &FiniteQuadraticForm,
    m: u64,
    allowed: &dyn Fn(&[i64]) -> bool,
    target: &FiniteQuadraticForm,
) -> Option<Vec<Vec<i64>>> {
    let elems = f.elements();
    let cands: Vec<usize> = (1..elems.len())
        .filter(|&k| f.q_is_zero(&elems[k]) && allowed(&elems[k]))
        .collect();
    let ok: HashSet<usize> = cands.iter().copied().collect();
    let mut visited: HashSet<Vec<usize>> = HashSet::new();
    fn dfs(
        f: &FiniteQuadraticForm,
        elems: &[Vec<i64>],
        cands: &[usize],
        ok: &HashSet<usize>,
        m: u64,
        gens: &mut Vec<Vec<i64>>,
        cur: &[usize],
        visited: &mut HashSet<Vec<usize>>,
        target: &FiniteQuadraticForm,
    ) -> Option<Vec<Vec<i64>>> {
        for &x in cands {
            if cur.binary_search(&x).is_ok() {
                continue;
            }
            if gens.iter().any(|g| !f.b_is_zero(&elems[x], g)) {
                continue;
            }
            gens.push(elems[x].clone());
            let span = f.span(gens);
            let n = span.len() as u64;
            let good = m % n == 0 && span.iter().all(|&k| k == 0 || ok.contains(&k));
            if good && visited.insert(span.clone()) {
                if n == m {
                    if let Ok(g) = overlattice_form(f, gens) {
                        if fqf_isomorphic(&g, target).unwrap_or(false) {
                            return Some(gens.clone());
                        }
                    }
                } else if let Some(w) = dfs(f, elems, cands, ok, m, gens, &span, visited, target) {
                    return Some(w);
                }
            }
            gens.pop();
        }
        None
    }
    dfs(f, &elems, &cands, &ok, m, &mut vec![], &[0], &mut visited, target)
}

/// Frame lattices `K` of rank 14 with `D(K) = (Z/2)^2, q = (1/2, 1/2)`,
/// returned as root lattice plus torsion `W = K / K^root`.
pub fn classify_frame_lattices() -> FrameClassification {
    let target = FiniteQuadraticForm::target();
    let mut cache: HashMap<RootType, RootSummand> = HashMap::new();
    let all = all_multisets(14);
    let mut out = FrameClassification {
        results: vec![],
        multisets: all.len(),
        case_two_candidates: 0,
        pruned_by_code_bound: vec![],
        rejected_by_root_condition: vec![],
    };
    for ms in &all {
        let det: u64 = ms.iter().map(|r| r.det_abs()).product();
        // Case I: K = K^root.
        if det == 4 {
            let sum = RootSum::new(ms, &mut cache);
            if fqf_isomorphic(&sum.form, &target).unwrap_or(false) {
                out.results.push(frame_result(ms, &FiniteQuadraticForm::trivial()));
            }
            continue;
        }
        // Case II: only A1 among the A_n, and |D| = 4 |W|^2 with W nontrivial.
        if ms.iter().any(|r| r.kind == AdeKind::A && r.rank >= 2) || det % 4 != 0 {
            continue;
        }
        let m = (det / 4).isqrt();
        if m < 2 || m * m != det / 4 {
            continue;
        }
        out.case_two_candidates += 1;
        let n_a1 = ms.iter().filter(|r| r.kind == AdeKind::A).count();
        let rest: u64 = ms.iter().filter(|r| r.kind != AdeKind::A).map(|r| r.det_abs()).product();
        // W meets the A1 part in a binary code with weights >= 8, and maps
        // into the discriminant group of the remaining summands.
        if (1u64 << griesmer_dim_d8(n_a1)) * rest < m {
            out.pruned_by_code_bound.push(root_label(ms));
            continue;
        }
        let sum = RootSum::new(ms, &mut cache);
        let two = Q::from_integer(2.into());
        let root_free = |x: &[i64]| sum.min_norm(x) != two;
        match find_glue(&sum.form, m, &root_free, &target) {
            Some(w) => {
                let ws = sum.form.span(&w);
                let wform = subgroup_form(&sum.form, &ws);
                out.results.push(frame_result(ms, &wform));
            }
            None => {
                if det <= BRUTE_FORCE_ORDER && find_glue(&sum.form, m, &|_| true, &target).is_some() {
                    out.rejected_by_root_condition.push(root_label(ms));
                }
            }
        }
    }
    out.results.sort_by(|a, b| a.root_label.cmp(&b.root_label));
    out
}

/// The subgroup as an abstract group (q ignored), for labelling.
fn subgroup_form(f: &FiniteQuadraticForm, elems: &[usize]) -> FiniteQuadraticForm {
    // element orders determine a finite abelian group up to isomorphism
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for &k in elems {
        *counts.entry(f.element_order(&f.element(k))).or_default() += 1;
    }
    let divisors = abelian_invariants(elems.len() as u64, &counts);
    let n = divisors.len();
    FiniteQuadraticForm::new(divisors, vec![vec![Q::zero(); n]; n])
}

/// Elementary divisors of a finite abelian group from its element-order
/// statistics, by matching against all candidate decompositions.
fn abelian_invariants(order: u64, counts: &HashMap<u64, u64>) -> Vec<u64> {
    let mut best = vec![];
    for cand in partitions_of_group(order) {
        let g = FiniteQuadraticForm::new(cand.clone(), vec![vec![Q::zero(); cand.len()]; cand.len()]);
        let mut c: HashMap<u64, u64> = HashMap::new();
        for x in g.elements() {
            *c.entry(g.element_order(&x)).or_default() += 1;
        }
        if &c == counts {
            best = g.elementary_divisors();
            break;
        }
    }
    best
}

fn partitions_of_group(order: u64) -> Vec<Vec<u64>> {
    // products of cyclic groups with orders multiplying to `order`
    let mut out = vec![];
    fn rec(rem: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rem == 1 {
            out.push(cur.clone());
            return;
        }
        for d in (2..=max.min(rem)).rev() {
            if rem % d == 0 {
                cur.push(d);
                rec(rem / d, d, cur, out);
                cur.pop();
            }
        }
    }
    rec(order, order, &mut vec![], &mut out);
    out
}

fn frame_result(ms: &[RootType], w: &FiniteQuadraticForm) -> FrameResult {
    let mut roots = ms.to_vec();
    sort_roots(&mut roots);
    FrameResult {
        root_label: root_label(&roots),
        roots,
        torsion: mw_label(&w.elementary_divisors()),
        torsion_order: w.order(),
    }
}

/// Mordell-Weil style label: `"trivial"`, `"Z/2Z"`, `"Z/2Z x Z/2Z"`.
pub fn mw_label(elementary_divisors: &[u64]) -> String {
    if elementary_divisors.is_empty() {
        return "trivial".into();
    }
    elementary_divisors
        .iter()
        .map(|d| format!("Z/{d}Z"))
        .collect::<Vec<_>>()
        .join(" x ")
}

/// Torsion `W` of a frame with the given root lattice: trivial when the root
/// lattice already has the target form, otherwise the root-free isotropic
/// gluing that produces it.
pub fn mw_torsion_from_frame(roots: &[RootType]) -> Result<String> {
    let target = FiniteQuadraticForm::target();
    let rank: usize = roots.iter().map(|r| r.rank).sum();
    let det: u64 = roots.iter().map(|r| r.det_abs()).product();
    let mut cache = HashMap::new();
    let sum = RootSum::new(roots, &mut cache);
    if det == 4 {
        if fqf_isomorphic(&sum.form, &target)? {
            return Ok(mw_label(&[]));
        }
        return Err(K3Error::Inconsistent(format!("{} has the wrong discriminant form", root_label(roots))));
    }
    let m = (det / 4).isqrt();
    if det % 4 != 0 || m * m != det / 4 {
        return Err(K3Error::Inconsistent(format!(
            "|D({})| = {det} is not 4 times a square (rank {rank})",
            root_label(roots)
        )));
    }
    let two = Q::from_integer(2.into());
    let root_free = |x: &[i64]| sum.min_norm(x) != two;
    match find_glue(&sum.form, m, &root_free, &target) {
        Some(w) => {
            let ws = sum.form.span(&w);
            Ok(mw_label(&subgroup_form(&sum.form, &ws).elementary_divisors()))
        }
        None => Err(K3Error::Inconsistent(format!("no admissible gluing for {}", root_label(roots)))),
    }
}

/// One root-free gluing of a root lattice: the torsion group `W` and the
/// discriminant group of the resulting overlattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Gluing {
    pub order: u64,
    pub torsion: String,
    pub disc_group: String,
}

/// All overlattices of the root lattice obtained from isotropic subgroups
/// that add no new roots, deduplicated by (torsion, discriminant group).
///
/// These are the candidate frames for a fibration with the given reducible
/// fibers and finite Mordell-Weil group.
pub fn root_free_gluings(roots: &[RootType]) -> Result<Vec<Gluing>> {
    let mut cache = HashMap::new();
    let sum = RootSum::new(roots, &mut cache);
    let two = Q::from_integer(2.into());
    let mut out: Vec<Gluing> = vec![];
    for w in isotropic_subgroups(&sum.form)? {
        let elems: Vec<Vec<i64>> = w.iter().map(|&k| sum.form.element(k)).collect();
        if elems.iter().skip(1).any(|x| sum.min_norm(x) == two) {
            continue;
        }
        let gens = sum.form.small_generators(&w);
        let over = overlattice_form(&sum.form, &gens)?;
        let g = Gluing {
            order: w.len() as u64,
            torsion: mw_label(&subgroup_form(&sum.form, &w).elementary_divisors()),
            disc_group: over.group_label(),
        };
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out.sort_by(|a, b| a.order.cmp(&b.order).then(a.disc_group.cmp(&b.disc_group)));
    Ok(out)
}

/// Mordell-Weil rank from Shioda-Tate.
pub fn shioda_tate_rank(root_ranks: &[usize], picard: usize) -> Result<usize> {
    let r = picard as i64 - 2 - root_ranks.iter().sum::<usize>() as i64;
    if r < 0 {
        return Err(K3Error::NegativeRank(r));
    }
    Ok(r as usize)
}

/// Smallest nonzero norm among the classes of `D(R)` on a root lattice,
/// exposed for diagnostics.
pub fn class_min_norms(rt: RootType) -> Vec<(Vec<i64>, Q, Q)> {
    let s = root_summand(rt);
    s.form
        .elements()
        .into_iter()
        .enumerate()
        .map(|(k, x)| {
            let q = s.form.q(&x);
            (x, q, s.min_norms[k].clone())
        })
        .collect()
}

/// True when the absolute determinant of the lattice equals the order of its
/// discriminant group.
pub fn det_matches_disc(l: &Lattice) -> Result<bool> {
    let f = discriminant_form(l)?;
    Ok(l.det().abs() == BigInt::from(f.order()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartan_determinants_and_root_counts() {
        for rt in [RootType::a(3), RootType::d(5), RootType::e(6), RootType::e(7), RootType::e(8)] {
            let l = root_lattice(rt);
            assert_eq!(l.det().abs(), BigInt::from(rt.det_abs()), "{rt}");
            assert_eq!(roots(rt).len(), rt.num_roots(), "{rt}");
        }
        assert!(RootType::new(AdeKind::D, 3).is_err());
        assert!(RootType::new(AdeKind::E, 9).is_err());
    }

    #[test]
    fn glue_norms() {
        let d12 = class_min_norms(RootType::d(12));
        let mut norms: Vec<Q> = d12.iter().skip(1).map(|(_, _, n)| n.clone()).collect();
        norms.sort();
        assert_eq!(norms, vec![Q::from_integer(1.into()), Q::from_integer(3.into()), Q::from_integer(3.into())]);
        let e7 = class_min_norms(RootType::e(7));
        assert_eq!(e7[1].2, exactalg::q(3, 2));
        let e6 = class_min_norms(RootType::e(6));
        assert!(e6.iter().skip(1).all(|(_, _, n)| *n == exactalg::q(4, 3)));
    }

    #[test]
    fn spec_parser() {
        let s = parse_lattice_spec("H+E8+D6").unwrap();
        assert_eq!(s.hyperbolic, 1);
        assert_eq!(s.lattice().rank(), 16);
        let s = parse_lattice_spec("D12+2A1").unwrap();
        assert_eq!(s.roots.len(), 3);
        assert!(parse_lattice_spec("F4").is_err());
        assert!(parse_lattice_spec("E7+").is_err());
    }

    #[test]
    fn griesmer() {
        assert_eq!(griesmer_dim_d8(7), 0);
        assert_eq!(griesmer_dim_d8(8), 1);
        assert_eq!(griesmer_dim_d8(12), 2);
        assert_eq!(griesmer_dim_d8(14), 3);
        assert_eq!(griesmer_dim_d8(15), 4);
    }

    #[test]
    fn overlattice_of_d12_a1_a1() {
        let ms = [RootType::d(12), RootType::a(1), RootType::a(1)];
        let mut cache = HashMap::new();
        let sum = RootSum::new(&ms, &mut cache);
        let subs = isotropic_subgroups(&sum.form).unwrap();
        assert!(subs.iter().any(|s| s.len() == 2));
        let target = FiniteQuadraticForm::target();
        let hits: Vec<&Vec<usize>> = subs
            .iter()
            .filter(|s| s.len() == 2)
            .filter(|s| {
                let w = vec![sum.form.element(s[1])];
                fqf_isomorphic(&overlattice_form(&sum.form, &w).unwrap(), &target).unwrap()
            })
            .collect();
        assert!(!hits.is_empty());
        assert_eq!(mw_torsion_from_frame(&ms).unwrap(), "Z/2Z");
    }

    #[test]
    fn frame_classification() {
        let c = classify_frame_lattices();
        let got: Vec<(String, String)> = c.results.iter().map(|r| (r.root_label.clone(), r.torsion.clone())).collect();
        eprintln!("{got:?} {:?} {:?}", c.pruned_by_code_bound, c.rejected_by_root_condition);
        assert_eq!(got.len(), 4);
    }

    #[test]
    fn gluings_of_enhanced_frames() {
        let labels = |roots: &[RootType]| -> Vec<(String, String)> {
            root_free_gluings(roots).unwrap().into_iter().map(|g| (g.torsion, g.disc_group)).collect()
        };
        // D14 + A1 with a 2-torsion section glues to E8 + E7 type
        let r = labels(&[RootType::d(14), RootType::a(1)]);
        assert!(r.contains(&("trivial".into(), "Z2^3".into())));
        assert!(r.contains(&("Z/2Z".into(), "Z2".into())));
        // E8 + E7 admits no gluing
        assert_eq!(labels(&[RootType::e(8), RootType::e(7)]), vec![("trivial".to_string(), "Z2".to_string())]);
        let r = labels(&[RootType::d(12), RootType::a(3)]);
        assert!(r.contains(&("Z/2Z".into(), "Z4".into())));
        let r = labels(&[RootType::d(16)]);
        assert!(r.contains(&("Z/2Z".into(), "0".into())));
    }
}
