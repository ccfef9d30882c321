use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Brute-force oracles refuse formulas with more variables than this.
pub const BRUTE_FORCE_MAX_VARS: usize = 24;

/// A literal over variable `var` (1-based, as in DIMACS).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Lit { var, positive: false }
    }

    pub fn from_dimacs(v: i64) -> Self {
        Lit {
            var: v.unsigned_abs() as usize,
            positive: v > 0,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    /// Truth value under `assignment`, where bit `var − 1` holds `var`.
    pub fn holds(self, assignment: u64) -> bool {
        (assignment >> (self.var - 1) & 1 == 1) == self.positive
    }

    #[must_use]
    pub fn negated(self) -> Self {
        Lit {
            var: self.var,
            positive: !self.positive,
        }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A CNF over variables `1..=num_vars` with at most three literals per clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf3 {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
}

impl Cnf3 {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Lit>>) -> Result<Self> {
        for (j, clause) in clauses.iter().enumerate() {
            let bad = |msg: String| Err(Error::MalformedCnf(format!("clause {}: {msg}", j + 1)));
            if clause.is_empty() {
                return bad("empty clause".into());
            }
            if clause.len() > 3 {
                return bad(format!("{} literals, at most 3 allowed", clause.len()));
            }
            let mut seen = BTreeSet::new();
            for lit in clause {
                if lit.var == 0 || lit.var > num_vars {
                    return bad(format!("variable {} out of range 1..={num_vars}", lit.var));
                }
                if !seen.insert(*lit) {
                    return bad(format!("literal {lit} repeated"));
                }
            }
        }
        Ok(Cnf3 { num_vars, clauses })
    }

    /// Builds from DIMACS-style signed integers.
    pub fn from_ints(num_vars: usize, clauses: &[&[i64]]) -> Result<Self> {
        Self::new(
            num_vars,
            clauses.iter().map(|c| c.iter().map(|&v| Lit::from_dimacs(v)).collect()).collect(),
        )
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn satisfied_by(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.holds(assignment)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&format!("{l} "));
            }
            out.push_str("0\n");
        }
        out
    }
}

fn check_brute_force(vars: usize) -> Result<()> {
    if vars > BRUTE_FORCE_MAX_VARS {
        Err(Error::MalformedCnf(format!(
            "{vars} variables exceed the brute-force limit of {BRUTE_FORCE_MAX_VARS}"
        )))
    } else {
        Ok(())
    }
}

/// The satisfying assignment maximizing `Σ_{α_i true} 2^i` (so `α_n` is the
/// most significant variable), as truth values indexed `α_1..α_n`.
pub fn sat_lexmax(phi: &Cnf3) -> Result<Option<Vec<bool>>> {
    let n = phi.num_vars();
    check_brute_force(n)?;
    let top: u64 = if n == 0 { 0 } else { (1u64 << n) - 1 };
    Ok((0..=top)
        .rev()
        .find(|&a| phi.satisfied_by(a))
        .map(|a| (0..n).map(|i| a >> i & 1 == 1).collect()))
}

/// `∀ universal ∃ existential : matrix`; every matrix variable is quantified
/// exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qbf2 {
    pub universal: Vec<usize>,
    pub existential: Vec<usize>,
    pub matrix: Cnf3,
}

impl Qbf2 {
    pub fn new(universal: Vec<usize>, existential: Vec<usize>, matrix: Cnf3) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &v in universal.iter().chain(&existential) {
            if v == 0 || v > matrix.num_vars() {
                return Err(Error::MalformedQbf(format!("quantified variable {v} out of range")));
            }
            if !seen.insert(v) {
                return Err(Error::MalformedQbf(format!("variable {v} quantified twice")));
            }
        }
        if seen.len() != matrix.num_vars() {
            return Err(Error::MalformedQbf("every variable must be quantified".into()));
        }
        Ok(Qbf2 {
            universal,
            existential,
            matrix,
        })
    }

    pub fn is_universal(&self, var: usize) -> bool {
        self.universal.contains(&var)
    }

    pub fn to_qdimacs(&self) -> String {
        let mut text = self.matrix.to_dimacs();
        let header_end = text.find('\n').map_or(text.len(), |k| k + 1);
        let mut prefix = String::new();
        for (q, vars) in [("a", &self.universal), ("e", &self.existential)] {
            if !vars.is_empty() {
                prefix.push_str(q);
                for v in vars {
                    prefix.push_str(&format!(" {v}"));
                }
                prefix.push_str(" 0\n");
            }
        }
        text.insert_str(header_end, &prefix);
        text
    }
}

/// Brute-force `∀∃` validity.
pub fn qbf_valid(phi: &Qbf2) -> Result<bool> {
    check_brute_force(phi.matrix.num_vars())?;
    let spread = |vars: &[usize], bits: u64| -> u64 {
        vars.iter()
            .enumerate()
            .filter(|(k, _)| bits >> k & 1 == 1)
            .fold(0u64, |acc, (_, &v)| acc | 1 << (v - 1))
    };
    let nu = phi.universal.len();
    let ne = phi.existential.len();
    Ok((0..1u64 << nu).all(|a| {
        let base = spread(&phi.universal, a);
        (0..1u64 << ne).any(|e| phi.matrix.satisfied_by(base | spread(&phi.existential, e)))
    }))
}

/// A 2QBF in which every universal `α_k` occurs in exactly two clauses,
/// `(α_k ∨ ¬β)` and `(¬α_k ∨ β)`, for an existential `β` private to `α_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nqbf2Forall(Qbf2);

impl Nqbf2Forall {
    pub fn new(q: Qbf2) -> Result<Self> {
        let mut twins = BTreeSet::new();
        for &a in &q.universal {
            let occurrences: Vec<&Vec<Lit>> = q
                .matrix
                .clauses()
                .iter()
                .filter(|c| c.iter().any(|l| l.var == a))
                .collect();
            let twin = |c: &Vec<Lit>, sign: bool| -> Option<usize> {
                match c.as_slice() {
                    [x, y] if x.var == a && x.positive == sign && !q.is_universal(y.var) && y.positive != sign => Some(y.var),
                    [y, x] if x.var == a && x.positive == sign && !q.is_universal(y.var) && y.positive != sign => Some(y.var),
                    _ => None,
                }
            };
            let paired = |pos: &Vec<Lit>, neg: &Vec<Lit>| match (twin(pos, true), twin(neg, false)) {
                (Some(b1), Some(b2)) if b1 == b2 => Some(b1),
                _ => None,
            };
            let ok = match occurrences.as_slice() {
                [c1, c2] => paired(c1, c2).or_else(|| paired(c2, c1)).is_some_and(|b| twins.insert(b)),
                _ => false,
            };
            if !ok {
                return Err(Error::MalformedQbf(format!(
                    "universal variable {a} must occur only in (α ∨ ¬β) and (¬α ∨ β) for a private existential β"
                )));
            }
        }
        Ok(Nqbf2Forall(q))
    }

    pub fn qbf(&self) -> &Qbf2 {
        &self.0
    }

    pub fn into_qbf(self) -> Qbf2 {
        self.0
    }
}

/// Rewrites a 2QBF into the restricted form: each universal `α_k` gets a
/// fresh existential twin that replaces it in the matrix, and two clauses
/// tie the twin to `α_k`. Inputs already in that form are returned as is.
pub fn normalize_qbf(q: &Qbf2) -> Nqbf2Forall {
    if let Ok(done) = Nqbf2Forall::new(q.clone()) {
        return done;
    }
    let base = q.matrix.num_vars();
    let fresh = |k: usize| base + 1 + k;
    let twin_of = |v: usize| q.universal.iter().position(|&a| a == v).map(fresh);
    let mut clauses: Vec<Vec<Lit>> = q
        .matrix
        .clauses()
        .iter()
        .map(|c| {
            c.iter()
                .map(|l| match twin_of(l.var) {
                    Some(t) => Lit {
                        var: t,
                        positive: l.positive,
                    },
                    None => *l,
                })
                .collect()
        })
        .collect();
    for (k, &a) in q.universal.iter().enumerate() {
        clauses.push(vec![Lit::pos(a), Lit::neg(fresh(k))]);
        clauses.push(vec![Lit::neg(a), Lit::pos(fresh(k))]);
    }
    let mut existential = q.existential.clone();
    existential.extend((0..q.universal.len()).map(fresh));
    let matrix = Cnf3::new(base + q.universal.len(), clauses).expect("substitution keeps clauses well formed");
    let out = Qbf2::new(q.universal.clone(), existential, matrix).expect("all variables quantified");
    Nqbf2Forall::new(out).expect("normal form by construction")
}

fn parse_header(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    match parts.as_slice() {
        ["p", "cnf", v, c] => {
            let v = v.parse().map_err(|_| Error::MalformedCnf(format!("line {line_no}: bad variable count")))?;
            let c = c.parse().map_err(|_| Error::MalformedCnf(format!("line {line_no}: bad clause count")))?;
            Ok((v, c))
        }
        _ => Err(Error::MalformedCnf(format!("line {line_no}: expected `p cnf <vars> <clauses>`"))),
    }
}

fn parse_ints(line_no: usize, line: &str) -> Result<Vec<i64>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| Error::MalformedCnf(format!("line {line_no}: not an integer: {t:?}")))
        })
        .collect()
}

struct Parsed {
    num_vars: usize,
    prefix: Vec<(char, Vec<usize>, usize)>,
    clauses: Vec<Vec<Lit>>,
}

fn parse(text: &str, allow_prefix: bool) -> Result<Parsed> {
    let mut header = None;
    let mut prefix = Vec::new();
    let mut clauses = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::MalformedCnf(format!("line {line_no}: second header")));
            }
            header = Some(parse_header(line_no, line)?);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(Error::MalformedCnf(format!("line {line_no}: data before the `p cnf` header")));
        };
        if let Some(q) = line.chars().next().filter(|c| *c == 'a' || *c == 'e') {
            if !allow_prefix {
                return Err(Error::MalformedCnf(format!("line {line_no}: quantifier line in a plain CNF file")));
            }
            if !clauses.is_empty() || !current.is_empty() {
                return Err(Error::MalformedQbf(format!("line {line_no}: quantifier after clauses")));
            }
            let ints = parse_ints(line_no, &line[1..])?;
            if ints.last() != Some(&0) {
                return Err(Error::MalformedQbf(format!("line {line_no}: quantifier block must end with 0")));
            }
            let mut vars = Vec::new();
            for &v in &ints[..ints.len() - 1] {
                if v <= 0 || v as usize > num_vars {
                    return Err(Error::MalformedQbf(format!("line {line_no}: bad quantified variable {v}")));
                }
                vars.push(v as usize);
            }
            prefix.push((q, vars, line_no));
            continue;
        }
        for v in parse_ints(line_no, line)? {
            if v == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if v.unsigned_abs() as usize > num_vars {
                    return Err(Error::MalformedCnf(format!("line {line_no}: variable {} exceeds header", v.abs())));
                }
                current.push(Lit::from_dimacs(v));
            }
        }
    }
    let Some((num_vars, expected)) = header else {
        return Err(Error::MalformedCnf("missing `p cnf` header".into()));
    };
    if !current.is_empty() {
        return Err(Error::MalformedCnf("last clause is not terminated by 0".into()));
    }
    if clauses.len() != expected {
        return Err(Error::MalformedCnf(format!(
            "header announces {expected} clauses, found {}",
            clauses.len()
        )));
    }
    Ok(Parsed {
        num_vars,
        prefix,
        clauses,
    })
}

/// Reads a DIMACS CNF file.
pub fn parse_dimacs(text: &str) -> Result<Cnf3> {
    let p = parse(text, false)?;
    Cnf3::new(p.num_vars, p.clauses)
}

/// Reads a QDIMACS file whose prefix is a `∀` block followed by an `∃`
/// block. Variables left unquantified join the `∃` block.
pub fn parse_qdimacs(text: &str) -> Result<Qbf2> {
    let p = parse(text, true)?;
    let matrix = Cnf3::new(p.num_vars, p.clauses).map_err(|e| match e {
        Error::MalformedCnf(m) => Error::MalformedQbf(m),
        other => other,
    })?;
    let mut universal = Vec::new();
    let mut existential = Vec::new();
    for (q, vars, line_no) in p.prefix {
        if q == 'a' {
            if !existential.is_empty() {
                return Err(Error::Not2Qbf(format!("line {line_no}: universal block after an existential block")));
            }
            universal.extend(vars);
        } else {
            existential.extend(vars);
        }
    }
    let quantified: BTreeSet<usize> = universal.iter().chain(&existential).copied().collect();
    existential.extend((1..=p.num_vars).filter(|v| !quantified.contains(v)));
    Qbf2::new(universal, existential, matrix)
}
