//! The configuration of 19 smooth rational curves on the quartic, divisor
//! classes supported on them, and checks of fiber classes and class
//! identities.
//!
//! The curves span the Neron-Severi group over Q (the intersection matrix
//! has rank 16), so two classes are equal in NS exactly when they have the
//! same intersection numbers with every curve.

use crate::error::{K3Error, Result};
use serde::Serialize;
use std::fmt;

pub const CURVES: [&str; 19] = [
    "a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8", "a9", "b1", "b2", "b3", "b4", "b5", "L1", "L2", "L3", "R1", "R2",
];

pub fn curve_index(name: &str) -> Option<usize> {
    CURVES.iter().position(|c| *c == name)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveGraph {
    matrix: Vec<Vec<i64>>,
}

impl CurveGraph {
    /// The dual graph of the curves: chains a1..a9 and b1..b5, the lines
    /// L1, L2, L3 and the residual conics R1, R2. The two drawn double
    /// edges L3-R1 and R2-b5 carry intersection number 2.
    pub fn standard() -> Self {
        let n = CURVES.len();
        let mut m = vec![vec![0i64; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = -2;
        }
        let mut edge = |a: &str, b: &str, w: i64| {
            let (i, j) = (curve_index(a).unwrap(), curve_index(b).unwrap());
            m[i][j] = w;
            m[j][i] = w;
        };
        for i in 1..9 {
            edge(&format!("a{i}"), &format!("a{}", i + 1), 1);
        }
        for i in 1..5 {
            edge(&format!("b{i}"), &format!("b{}", i + 1), 1);
        }
        for (a, b) in [("a9", "L1"), ("L1", "b2"), ("a1", "L3"), ("a1", "R2"), ("a3", "L2"), ("b4", "R1")] {
            edge(a, b, 1);
        }
        edge("L3", "R1", 2);
        edge("R2", "b5", 2);
        CurveGraph { matrix: m }
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn get(&self, a: &str, b: &str) -> i64 {
        self.matrix[curve_index(a).unwrap()][curve_index(b).unwrap()]
    }

    pub fn pairing(&self, x: &DivisorClass, y: &DivisorClass) -> i64 {
        let mut acc = 0;
        for (i, &a) in x.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.0.iter().enumerate() {
                acc += a * self.matrix[i][j] * b;
            }
        }
        acc
    }

    /// Intersection numbers of `d` with every curve.
    pub fn pairing_vector(&self, d: &DivisorClass) -> Vec<i64> {
        (0..CURVES.len())
            .map(|j| d.0.iter().enumerate().map(|(i, a)| a * self.matrix[i][j]).sum())
            .collect()
    }

    /// Rank of the intersection matrix over Q.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<exactalg::Q>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|&x| exactalg::Q::from_integer(x.into())).collect())
            .collect();
        let n = a.len();
        let mut rank = 0;
        for c in 0..n {
            let Some(p) = (rank..n).find(|&r| a[r][c] != exactalg::q(0, 1)) else {
                continue;
            };
            a.swap(rank, p);
            for r in 0..n {
                if r != rank && a[r][c] != exactalg::q(0, 1) {
                    let f = &a[r][c] / &a[rank][c];
                    for j in c..n {
                        let v = &a[rank][j] * &f;
                        a[r][j] -= v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Equality in the Neron-Severi group.
    pub fn equivalent(&self, x: &DivisorClass, y: &DivisorClass) -> bool {
        self.pairing_vector(&x.sub(y)).iter().all(|&v| v == 0)
    }
}

/// Integer combination of the 19 curves.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisorClass(pub [i64; 19]);

impl DivisorClass {
    pub fn zero() -> Self {
        DivisorClass([0; 19])
    }

    pub fn curve(name: &str) -> Result<Self> {
        let i = curve_index(name).ok_or_else(|| K3Error::Parse(format!("unknown curve {name:?}")))?;
        let mut d = Self::zero();
        d.0[i] = 1;
        Ok(d)
    }

    /// Parses `"L3 + 2a1 + 3a2 - a4"`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut d = Self::zero();
        let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if src == "0" {
            return Ok(d);
        }
        let mut i = 0;
        let b = src.as_bytes();
        while i < b.len() {
            let mut sign = 1;
            if b[i] == b'+' || b[i] == b'-' {
                sign = if b[i] == b'-' { -1 } else { 1 };
                i += 1;
            }
            let start = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let coef: i64 = if start == i { 1 } else { src[start..i].parse().unwrap() };
            let nstart = i;
            while i < b.len() && b[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let name = &src[nstart..i];
            let k = curve_index(name).ok_or_else(|| K3Error::Parse(format!("unknown curve {name:?} in {s:?}")))?;
            d.0[k] += sign * coef;
        }
        Ok(d)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut d = self.clone();
        for i in 0..19 {
            d.0[i] += o.0[i];
        }
        d
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut d = self.clone();
        d.0.iter_mut().for_each(|x| *x *= k);
        d
    }

    pub fn support(&self) -> Vec<usize> {
        (0..19).filter(|&i| self.0[i] != 0).collect()
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = if c.abs() == 1 { String::new() } else { c.abs().to_string() };
            write!(f, "{}{sign}{mag}{}", if first { "" } else { " " }, CURVES[i])?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Extended Dynkin diagram of a reducible fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExtendedType {
    A1,
    D(usize),
    E6,
    E7,
    E8,
}

impl ExtendedType {
    /// Accepts `"A1"`, `"D12"`, `"E7"` with or without a hat.
    pub fn parse(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        let t = t.to_uppercase();
        match t.as_str() {
            "A1" => Ok(ExtendedType::A1),
            "E6" => Ok(ExtendedType::E6),
            "E7" => Ok(ExtendedType::E7),
            "E8" => Ok(ExtendedType::E8),
            _ if t.starts_with('D') => match t[1..].parse::<usize>() {
                Ok(n) if n >= 4 => Ok(ExtendedType::D(n)),
                _ => Err(K3Error::UnknownType(s.into())),
            },
            _ => Err(K3Error::UnknownType(s.into())),
        }
    }

    /// Weighted adjacency and marks.
    pub fn diagram(&self) -> (Vec<Vec<i64>>, Vec<i64>) {
        let mut edges: Vec<(usize, usize)> = vec![];
        let marks: Vec<i64>;
        match *self {
            ExtendedType::A1 => return (vec![vec![0, 2], vec![2, 0]], vec![1, 1]),
            ExtendedType::D(n) => {
                // chain 0..n-4 of mark 2, forks n-3, n-2 at 0 and n-1, n at the end
                let c = n - 3;
                for i in 0..c - 1 {
                    edges.push((i, i + 1));
                }
                edges.extend([(0, c), (0, c + 1), (c - 1, c + 2), (c - 1, c + 3)]);
                let mut m = vec![2; c];
                m.extend([1, 1, 1, 1]);
                marks = m;
            }
            ExtendedType::E6 => {
                edges.extend([(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)]);
                marks = vec![3, 2, 1, 2, 1, 2, 1];
            }
            ExtendedType::E7 => {
                edges.extend([(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (3, 7)]);
                marks = vec![1, 2, 3, 4, 3, 2, 1, 2];
            }
            ExtendedType::E8 => {
                edges.extend([(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (2, 8)]);
                marks = vec![2, 4, 6, 5, 4, 3, 2, 1, 3];
            }
        }
        let n = marks.len();
        let mut adj = vec![vec![0i64; n]; n];
        for (a, b) in edges {
            adj[a][b] = 1;
            adj[b][a] = 1;
        }
        (adj, marks)
    }
}

impl fmt::Display for ExtendedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedType::A1 => write!(f, "A1^"),
            ExtendedType::D(n) => write!(f, "D{n}^"),
            ExtendedType::E6 => write!(f, "E6^"),
            ExtendedType::E7 => write!(f, "E7^"),
            ExtendedType::E8 => write!(f, "E8^"),
        }
    }
}

/// Maps support nodes onto diagram nodes, matching weighted adjacency and
/// (optionally) multiplicities against marks.
fn find_embedding(
    g: &CurveGraph,
    support: &[usize],
    mults: &[i64],
    adj: &[Vec<i64>],
    marks: &[i64],
    use_marks: bool,
) -> Option<Vec<usize>> {
    if support.len() != marks.len() {
        return None;
    }
    fn rec(
        g: &CurveGraph,
        support: &[usize],
        mults: &[i64],
        adj: &[Vec<i64>],
        marks: &[i64],
        use_marks: bool,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let k = map.len();
        if k == support.len() {
            return true;
        }
        for t in 0..marks.len() {
            if used[t] || (use_marks && marks[t] != mults[k]) {
                continue;
            }
            if (0..k).any(|j| g.matrix[support[k]][support[j]] != adj[t][map[j]]) {
                continue;
            }
            map.push(t);
            used[t] = true;
            if rec(g, support, mults, adj, marks, use_marks, map, used) {
                return true;
            }
            map.pop();
            used[t] = false;
        }
        false
    }
    let mut map = vec![];
    let mut used = vec![false; marks.len()];
    rec(g, support, mults, adj, marks, use_marks, &mut map, &mut used).then_some(map)
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberCheck {
    pub self_intersection: i64,
    pub adjacency_ok: bool,
    pub marks_ok: bool,
    pub section_pairings: Vec<(String, i64)>,
}

impl FiberCheck {
    pub fn passed(&self) -> bool {
        self.self_intersection == 0
            && self.adjacency_ok
            && self.marks_ok
            && self.section_pairings.iter().all(|(_, p)| *p == 1)
    }
}

pub fn verify_fiber_class(g: &CurveGraph, f: &DivisorClass, t: ExtendedType, sections: &[&str]) -> Result<FiberCheck> {
    let (adj, marks) = t.diagram();
    let support = f.support();
    let mults: Vec<i64> = support.iter().map(|&i| f.0[i]).collect();
    let mut section_pairings = vec![];
    for s in sections {
        section_pairings.push((s.to_string(), g.pairing(&DivisorClass::curve(s)?, f)));
    }
    Ok(FiberCheck {
        self_intersection: g.pairing(f, f),
        adjacency_ok: find_embedding(g, &support, &mults, &adj, &marks, false).is_some(),
        marks_ok: find_embedding(g, &support, &mults, &adj, &marks, true).is_some(),
        section_pairings,
    })
}

/// Fiber class with the standard marks on the given components, which must
/// form the extended diagram of type `t`.
pub fn fiber_from_components(g: &CurveGraph, names: &[&str], t: ExtendedType) -> Result<DivisorClass> {
    let support: Vec<usize> = names
        .iter()
        .map(|n| curve_index(n).ok_or_else(|| K3Error::Parse(format!("unknown curve {n:?}"))))
        .collect::<Result<_>>()?;
    let (adj, marks) = t.diagram();
    let ones = vec![1; support.len()];
    let map = find_embedding(g, &support, &ones, &adj, &marks, false)
        .ok_or_else(|| K3Error::UnknownType(format!("components do not form {t}")))?;
    let mut d = DivisorClass::zero();
    for (k, &i) in support.iter().enumerate() {
        d.0[i] = marks[map[k]];
    }
    Ok(d)
}

/// `L2 + a1 + 2a2 + 3(a3 + ... + a9) + 3L1 + 2b1 + 4b2 + 3b3 + 2b4 + b5`.
pub fn polarizing_divisor() -> DivisorClass {
    DivisorClass::parse("L2 + a1 + 2a2 + 3a3 + 3a4 + 3a5 + 3a6 + 3a7 + 3a8 + 3a9 + 3L1 + 2b1 + 4b2 + 3b3 + 2b4 + b5").unwrap()
}

#[derive(Clone, Debug)]
pub struct FiberSpec {
    pub fibration: &'static str,
    pub name: &'static str,
    pub class: DivisorClass,
    pub kind: ExtendedType,
    pub sections: Vec<&'static str>,
}

/// Every reducible fiber of the four fibrations, in the embeddings drawn on
/// the curve configuration. Fibers written out with multiplicities are
/// taken verbatim; the others get their marks from the diagram.
pub fn fiber_catalog() -> Vec<FiberSpec> {
    let g = CurveGraph::standard();
    let p = |s: &str| DivisorClass::parse(s).unwrap();
    let c = |names: &[&str], t| fiber_from_components(&g, names, t).unwrap();
    use ExtendedType::*;
    vec![
        FiberSpec {
            fibration: "std",
            name: "F_std(a)",
            class: p("L3 + 2a1 + 3a2 + 4a3 + 2L2 + 3a4 + 2a5 + a6"),
            kind: E7,
            sections: vec!["a7"],
        },
        FiberSpec {
            fibration: "std",
            name: "F_std(a) second fiber",
            class: c(&["b5", "b4", "b3", "b2", "b1", "L1", "a9", "a8"], E7),
            kind: E7,
            sections: vec!["a7"],
        },
        FiberSpec {
            fibration: "std",
            name: "F_std(b)",
            class: p("R2 + 2a1 + 3a2 + 4a3 + 2L2 + 3a4 + 2a5 + a6"),
            kind: E7,
            sections: vec!["a7"],
        },
        FiberSpec {
            fibration: "std",
            name: "F_std(b) second fiber",
            class: c(&["R1", "b4", "b3", "b2", "b1", "L1", "a9", "a8"], E7),
            kind: E7,
            sections: vec!["a7"],
        },
        FiberSpec {
            fibration: "alt",
            name: "F_alt",
            class: p("a2 + 2a3 + L2 + 2a4 + 2a5 + 2a6 + 2a7 + 2a8 + 2a9 + 2L1 + b1 + 2b2 + b3"),
            kind: D(12),
            sections: vec!["a1", "b4"],
        },
        FiberSpec {
            fibration: "alt",
            name: "F_alt A1 (L3, R1)",
            class: c(&["L3", "R1"], A1),
            kind: A1,
            sections: vec!["a1", "b4"],
        },
        FiberSpec {
            fibration: "alt",
            name: "F_alt A1 (R2, b5)",
            class: c(&["R2", "b5"], A1),
            kind: A1,
            sections: vec!["a1", "b4"],
        },
        FiberSpec {
            fibration: "bfd",
            name: "F_bfd(a)",
            class: p("L1 + b1 + 2b2 + 2b3 + 2b4 + b5 + R1"),
            kind: D(6),
            sections: vec!["a9"],
        },
        FiberSpec {
            fibration: "bfd",
            name: "F_bfd(a) E8 fiber",
            class: c(&["a1", "a2", "a3", "L2", "a4", "a5", "a6", "a7", "a8"], E8),
            kind: E8,
            sections: vec!["a9"],
        },
        FiberSpec {
            fibration: "bfd",
            name: "F_bfd(b)",
            class: p("R2 + L2 + L3 + 2a1 + 2a2 + 2a3 + a4"),
            kind: D(6),
            sections: vec!["a5"],
        },
        FiberSpec {
            fibration: "bfd",
            name: "F_bfd(b) E8 fiber",
            class: c(&["b4", "b3", "b1", "b2", "L1", "a9", "a8", "a7", "a6"], E8),
            kind: E8,
            sections: vec!["a5"],
        },
        FiberSpec {
            fibration: "max",
            name: "F_max(a)",
            class: p("R2 + L3 + 2a1 + 2a2 + 2a3 + 2a4 + 2a5 + 2a6 + 2a7 + 2a8 + 2a9 + 2L1 + 2b2 + b1 + b3"),
            kind: D(14),
            sections: vec!["b4"],
        },
        FiberSpec {
            fibration: "max",
            name: "F_max(b)",
            class: p("R1 + L2 + 2L1 + a2 + 2a3 + 2a4 + 2a5 + 2a6 + 2a7 + 2a8 + 2a9 + 2b2 + 2b3 + 2b4 + b5"),
            kind: D(14),
            sections: vec!["a1"],
        },
    ]
}

#[derive(Clone, Debug)]
pub struct ClassIdentity {
    pub name: &'static str,
    pub lhs: DivisorClass,
    pub rhs: DivisorClass,
}

/// The residual-class identities relating the polarization, a fiber and the
/// curves in the base locus of the inducing pencil, as printed.
pub fn class_identities() -> Vec<ClassIdentity> {
    let h = polarizing_divisor();
    let p = |s: &str| DivisorClass::parse(s).unwrap();
    let f = |name: &str| fiber_catalog().into_iter().find(|x| x.name == name).unwrap().class;
    vec![
        ClassIdentity {
            name: "H - F_std(a) - L2",
            lhs: h.sub(&f("F_std(a)")).sub(&p("L2")),
            rhs: p("a1 + 2a2 + 3a3 + 3a4 + 3a5 + 3a6 + 3a7 + 2a8 + a9"),
        },
        ClassIdentity {
            name: "2H - F_std(b) - L1 - L2 - L3",
            lhs: h.scale(2).sub(&f("F_std(b)")).sub(&p("L1 + L2 + L3")),
            rhs: p("2a1 + 3a2 + 4a3 + 4a4 + 4a5 + 4a6 + 4a7 + 3a8 + 2a9 + b1 + 2b2 + 2b3 + 2b4 + 2b5"),
        },
        ClassIdentity {
            name: "H - F_alt - L1",
            lhs: h.sub(&f("F_alt")).sub(&p("L1")),
            rhs: p("a1 + a2 + a3 + a4 + a5 + a6 + a7 + a8 + a9 + b1 + 2b2 + b3"),
        },
        ClassIdentity {
            name: "H - F_bfd(a) - L3",
            lhs: h.sub(&f("F_bfd(a)")).sub(&p("L3")),
            rhs: p("a1 + a2 + a3 + a4 + a5 + a6 + a7 + a8 + a9"),
        },
        ClassIdentity {
            name: "2H - F_bfd(b) - L1 - 2L2",
            lhs: h.scale(2).sub(&f("F_bfd(b)")).sub(&p("L1 + 2L2")),
            rhs: p("2a1 + 4a2 + 6a3 + 6a4 + 6a5 + 5a6 + 4a7 + 3a8 + 2a9 + b1 + 2b2 + 2b3 + 2b4 + 2b5"),
        },
        ClassIdentity {
            name: "2H - F_max(a) - R1",
            lhs: h.scale(2).sub(&f("F_max(a)")).sub(&p("R1")),
            rhs: p("b1 + 2b2 + 3b3 + 4b4 + 3b5"),
        },
        ClassIdentity {
            name: "3H - F_max(a) - R1 - R2 - L1",
            lhs: h.scale(3).sub(&f("F_max(a)")).sub(&p("R1 + R2 + L1")),
            rhs: p("a1 + a2 + a3 + a4 + a5 + a6 + a7 + a8 + a9 + 2b1 + 4b2 + 5b3 + 6b4 + 5b5"),
        },
    ]
}

/// Right-hand side for the alternate-fibration identity that does hold in
/// NS (found by search over small coefficients on the b-chain).
pub fn alt_identity_corrected_rhs() -> DivisorClass {
    DivisorClass::parse("a1 + a2 + a3 + a4 + a5 + a6 + a7 + a8 + a9 + b1 + 2b2 + 2b3 + 2b4 + b5").unwrap()
}

/// Compares two classes in the Neron-Severi group.
pub fn verify_class_identity(g: &CurveGraph, lhs: &DivisorClass, rhs: &DivisorClass) -> bool {
    g.equivalent(lhs, rhs)
}

/// Literal equality of the curve coefficients.
pub fn coefficientwise_equal(lhs: &DivisorClass, rhs: &DivisorClass) -> bool {
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chains_are_negated_cartan_matrices() {
        let g = CurveGraph::standard();
        for (prefix, n) in [("a", 9usize), ("b", 5)] {
            for i in 1..=n {
                for j in 1..=n {
                    let want = if i == j {
                        -2
                    } else if i.abs_diff(j) == 1 {
                        1
                    } else {
                        0
                    };
                    assert_eq!(g.get(&format!("{prefix}{i}"), &format!("{prefix}{j}")), want);
                }
            }
        }
    }

    #[test]
    fn basic_pairings() {
        let g = CurveGraph::standard();
        let a1 = DivisorClass::curve("a1").unwrap();
        assert_eq!(g.pairing(&a1, &a1), -2);
        assert_eq!(g.get("L3", "R1"), 2);
        let h = polarizing_divisor();
        assert_eq!(g.pairing(&h, &h), 4);
        assert_eq!(g.rank(), 16);
        assert!(verify_class_identity(&g, &h.sub(&h), &DivisorClass::zero()));
    }

    #[test]
    fn class_parse_roundtrip() {
        let d = DivisorClass::parse("L3 + 2a1 - 3b5").unwrap();
        assert_eq!(DivisorClass::parse(&d.to_string()).unwrap(), d);
        assert!(DivisorClass::parse("2x1").is_err());
    }

    #[test]
    fn wrong_marks_are_rejected() {
        let g = CurveGraph::standard();
        let f = DivisorClass::parse("L3 + 2a1 + 3a2 + 4a3 + 2L2 + 3a4 + 2a5 + 2a6").unwrap();
        let c = verify_fiber_class(&g, &f, ExtendedType::E7, &["a7"]).unwrap();
        assert!(c.adjacency_ok && !c.marks_ok && !c.passed());
        assert!(ExtendedType::parse("F4").is_err());
    }
}
