//! Bar components as signed sums of tensor words, before any evaluation.
//!
//! A word like `E ⊗ A ⊗ m_2` is a list of [`Factor`]s. Labels use the compact
//! notation `EAm_2 - p_2A^2`: `A`, `E`, `A^3` are identities and `m_k`, `p_k`,
//! `f_k` are operations of arity `k`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    /// Identity on the object named by the letter.
    Id(char),
    /// Operation `name_arity`.
    Op(char, usize),
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Id(c) => write!(f, "{c}"),
            Factor::Op(c, k) => write!(f, "{c}_{k}"),
        }
    }
}

/// `coeff · (factor_1 ⊗ ... ⊗ factor_r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: i64,
    pub factors: Vec<Factor>,
}

/// A normalised sum of terms: like words merged, zero terms dropped, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Formal {
    pub terms: Vec<Term>,
}

impl Formal {
    pub fn new(terms: impl IntoIterator<Item = Term>) -> Formal {
        let mut acc: BTreeMap<Vec<Factor>, i64> = BTreeMap::new();
        for t in terms {
            *acc.entry(t.factors).or_default() += t.coeff;
        }
        Formal { terms: acc.into_iter().filter(|(_, c)| *c != 0).map(|(factors, coeff)| Term { coeff, factors }).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Parses labels such as `-Am_3 - m_3A`, `-f_1f_2 + f_2 f_1` or `2A^2m_2`.
    pub fn parse(label: &str) -> Result<Formal> {
        let chars: Vec<char> = label.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |msg: &str| Error::Invalid(format!("label {label:?}: {msg}"));
        let number = |pos: &mut usize| -> Option<usize> {
            let start = *pos;
            while *pos < chars.len() && chars[*pos].is_ascii_digit() {
                *pos += 1;
            }
            chars[start..*pos].iter().collect::<String>().parse().ok()
        };
        let mut terms = Vec::new();
        let mut pos = 0;
        while pos < chars.len() {
            let mut coeff = 1;
            while pos < chars.len() && (chars[pos] == '+' || chars[pos] == '-') {
                if chars[pos] == '-' {
                    coeff = -coeff;
                }
                pos += 1;
            }
            if pos < chars.len() && chars[pos].is_ascii_digit() {
                coeff *= number(&mut pos).ok_or_else(|| bad("coefficient out of range"))? as i64;
            }
            let mut factors = Vec::new();
            while pos < chars.len() && chars[pos] != '+' && chars[pos] != '-' {
                let c = chars[pos];
                pos += 1;
                if c.is_ascii_uppercase() {
                    let mut reps = 1;
                    if pos < chars.len() && chars[pos] == '^' {
                        pos += 1;
                        reps = number(&mut pos).ok_or_else(|| bad("expected an exponent"))?;
                    }
                    factors.extend(std::iter::repeat_n(Factor::Id(c), reps));
                } else if c.is_ascii_lowercase() {
                    if pos >= chars.len() || chars[pos] != '_' {
                        return Err(bad("operations are written like m_2"));
                    }
                    pos += 1;
                    let k = number(&mut pos).ok_or_else(|| bad("expected an arity"))?;
                    factors.push(Factor::Op(c, k));
                } else {
                    return Err(bad(&format!("unexpected character {c:?}")));
                }
            }
            if factors.is_empty() {
                return Err(bad("empty term"));
            }
            terms.push(Term { coeff, factors });
        }
        Ok(Formal::new(terms))
    }
}

impl fmt::Display for Formal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, t) in self.terms.iter().enumerate() {
            let sign = if t.coeff < 0 { "-" } else { "+" };
            match (n, t.coeff.abs()) {
                (0, 1) if t.coeff < 0 => write!(f, "-")?,
                (0, 1) => {}
                (0, c) => write!(f, "{}{c}", if t.coeff < 0 { "-" } else { "" })?,
                (_, 1) => write!(f, " {sign} ")?,
                (_, c) => write!(f, " {sign} {c}")?,
            }
            let mut i = 0;
            while i < t.factors.len() {
                let mut run = 1;
                if let Factor::Id(_) = t.factors[i] {
                    while i + run < t.factors.len() && t.factors[i + run] == t.factors[i] {
                        run += 1;
                    }
                }
                write!(f, "{}", t.factors[i])?;
                if run > 1 {
                    write!(f, "^{run}")?;
                }
                i += run;
            }
        }
        Ok(())
    }
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn ids(c: char, n: usize) -> impl Iterator<Item = Factor> {
    std::iter::repeat_n(Factor::Id(c), n)
}

fn word(parts: impl IntoIterator<Item = Factor>) -> Vec<Factor> {
    parts.into_iter().collect()
}

/// Algebra bar component `A^{⊗(i+k)} -> A^{⊗i}`.
pub fn bar_algebra_terms(i: usize, k: usize) -> Formal {
    if i == 0 || k == 0 {
        return Formal::default();
    }
    let (ii, kk) = (i as i64, k as i64);
    let outer = sign((ii - 1) * (kk + 1));
    Formal::new((0..i).map(|j| Term {
        coeff: outer * sign(j as i64 * kk),
        factors: word(ids('A', i - j - 1).chain([Factor::Op('m', k + 1)]).chain(ids('A', j))),
    }))
}

/// Right-module bar component `E ⊗ A^{⊗(i+k-1)} -> E ⊗ A^{⊗(i-1)}`.
pub fn bar_right_terms(i: usize, k: usize) -> Formal {
    if i == 0 || k == 0 {
        return Formal::default();
    }
    let (ii, kk) = (i as i64, k as i64);
    let outer = sign((ii - 1) * (kk + 1));
    let mut terms: Vec<Term> = (0..i.saturating_sub(1))
        .map(|j| Term {
            coeff: outer * sign(j as i64 * kk),
            factors: word(ids('E', 1).chain(ids('A', i - j - 2)).chain([Factor::Op('m', k + 1)]).chain(ids('A', j))),
        })
        .collect();
    terms.push(Term {
        coeff: outer * sign((ii - 1) * kk),
        factors: word([Factor::Op('p', k + 1)].into_iter().chain(ids('A', i - 1))),
    });
    Formal::new(terms)
}

/// Left-module bar component `A^{⊗(i+k-1)} ⊗ E -> A^{⊗(i-1)} ⊗ E`.
pub fn bar_left_terms(i: usize, k: usize) -> Formal {
    if i == 0 || k == 0 {
        return Formal::default();
    }
    let (ii, kk) = (i as i64, k as i64);
    let outer = sign((ii - 1) * (kk + 1));
    let mut terms: Vec<Term> = (1..i)
        .map(|j| Term {
            coeff: outer * sign(j as i64 * kk),
            factors: word(
                ids('A', i - j - 1).chain([Factor::Op('m', k + 1)]).chain(ids('A', j - 1)).chain(ids('E', 1)),
            ),
        })
        .collect();
    terms.push(Term { coeff: outer, factors: word(ids('A', i - 1).chain([Factor::Op('p', k + 1)])) });
    Formal::new(terms)
}

fn compositions(total: usize, parts: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>) {
    if parts == 0 {
        if total == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for t in 1..=total.saturating_sub(parts - 1) {
        cur.push(t);
        compositions(total - t, parts - 1, out, cur);
        cur.pop();
    }
}

/// Algebra-morphism bar component `A^{⊗(i+k)} -> B^{⊗i}`, including `k = 0`.
pub fn bar_alg_morphism_terms(i: usize, k: usize) -> Formal {
    if i == 0 {
        return Formal::default();
    }
    let mut all = Vec::new();
    compositions(i + k, i, &mut all, &mut Vec::new());
    Formal::new(all.into_iter().map(|t| {
        let mut e = 0i64;
        let mut prefix = t[0] as i64;
        for l in 1..i {
            prefix += t[l] as i64;
            e += (1 - t[l] as i64) * prefix;
        }
        Term { coeff: sign(e), factors: t.iter().map(|a| Factor::Op('f', *a)).collect() }
    }))
}

/// Bar component of a degree-`j` right-module morphism,
/// `E ⊗ A^{⊗(i+k-1)} -> F ⊗ A^{⊗(i-1)}`.
pub fn bar_right_morphism_terms(j: i64, i: usize, k: usize) -> Formal {
    if i == 0 {
        return Formal::default();
    }
    Formal::new([Term {
        coeff: sign(j * (i as i64 - 1)),
        factors: word([Factor::Op('f', k + 1)].into_iter().chain(ids('A', i - 1))),
    }])
}

/// Bar component of a degree-`j` left-module morphism,
/// `A^{⊗(i+k-1)} ⊗ E -> A^{⊗(i-1)} ⊗ F`.
pub fn bar_left_morphism_terms(j: i64, i: usize, k: usize) -> Formal {
    if i == 0 {
        return Formal::default();
    }
    Formal::new([Term {
        coeff: sign((j + k as i64) * (i as i64 - 1)),
        factors: word(ids('A', i - 1).chain([Factor::Op('f', k + 1)])),
    }])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for label in ["Am_2 - m_2A", "-Am_3 - m_3A", "EAm_2 - p_2A^2", "-f_1f_2 + f_2f_1", "2A^2m_2"] {
            let f = Formal::parse(label).unwrap();
            assert_eq!(Formal::parse(&f.to_string()).unwrap(), f, "{label}");
        }
    }

    #[test]
    fn parser_merges_and_cancels() {
        assert!(Formal::parse("Am_2 - Am_2").unwrap().is_zero());
        assert_eq!(Formal::parse("m_2A + m_2A").unwrap().terms[0].coeff, 2);
        assert!(Formal::parse("A+").is_err());
        assert!(Formal::parse("m2").is_err());
    }

    #[test]
    fn low_algebra_components() {
        assert_eq!(bar_algebra_terms(1, 1), Formal::parse("m_2").unwrap());
        assert_eq!(bar_algebra_terms(2, 1), Formal::parse("Am_2 - m_2A").unwrap());
        assert_eq!(bar_algebra_terms(2, 2), Formal::parse("-Am_3 - m_3A").unwrap());
    }

    #[test]
    fn morphism_compositions_cover_every_split() {
        assert_eq!(bar_alg_morphism_terms(2, 1), Formal::parse("-f_1f_2 + f_2f_1").unwrap());
        assert_eq!(bar_alg_morphism_terms(3, 2).terms.len(), 6);
    }
}
