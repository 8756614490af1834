//! Parsing of `--group` and `--rep` strings.
//!
//! Groups: `trivial`, `antipodal` (both act on `R^{dim+1}`), `z<N>`, `q8`,
//! `type1:m,n',r,k,l,d`, or a path to a JSON group file with `degree` and row-major
//! `generators`.
//!
//! Representations are `+`-separated terms: `d` (the defining representation), `t`
//! (one trivial dimension) and, for `z<N>`, `r<k>` (rotation through `2πk/N` on a plane).
//! A term may carry a multiplier, as in `2d`.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use sphereform::groups::{
    antipodal_group, close_group, cyclic_group, quaternion_group, rotation2, trivial_group, type1_generators,
    FiniteMatrixGroup, Type1Params, DEFAULT_MAX_ORDER,
};
use sphereform::reps::{direct_sum, Representation};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Trivial,
    Antipodal,
    Cyclic(usize),
    Quaternion,
    Type1(Type1Params),
    File(String),
}

impl GroupSpec {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "trivial" => return Ok(Self::Trivial),
            "antipodal" => return Ok(Self::Antipodal),
            "q8" | "quaternion" => return Ok(Self::Quaternion),
            _ => {}
        }
        if let Some(n) = lower.strip_prefix('z') {
            if let Ok(n) = n.parse::<usize>() {
                if n == 0 {
                    return Err(CliError::Usage("z0 is not a group".into()));
                }
                return Ok(Self::Cyclic(n));
            }
        }
        if let Some(rest) = lower.strip_prefix("type1:") {
            let v: Vec<u64> = rest
                .split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Usage(format!("bad type1 parameters {rest:?}")))?;
            if v.len() != 6 {
                return Err(CliError::Usage("type1 needs m,n',r,k,l,d".into()));
            }
            return Ok(Self::Type1(Type1Params {
                m: v[0],
                n_prime: v[1],
                r: v[2],
                k: v[3],
                l: v[4],
                d: v[5],
            }));
        }
        if Path::new(s).is_file() {
            return Ok(Self::File(s.to_string()));
        }
        Err(CliError::Usage(format!("unknown group {s:?} (and no such file)")))
    }

    /// The group as a matrix group; `dim` is the sphere dimension for `trivial` and `antipodal`.
    pub fn build(&self, dim: usize) -> Result<Arc<FiniteMatrixGroup>, CliError> {
        let g = match self {
            Self::Trivial => trivial_group(dim)?,
            Self::Antipodal => antipodal_group(dim)?,
            Self::Cyclic(n) => cyclic_group(*n)?,
            Self::Quaternion => quaternion_group()?,
            Self::Type1(p) => {
                let (a, b) = type1_generators(p)?;
                close_group(&[a, b], DEFAULT_MAX_ORDER)?
            }
            Self::File(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
                FiniteMatrixGroup::from_json(&text, DEFAULT_MAX_ORDER)?
            }
        };
        Ok(Arc::new(g))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Term {
    Defining,
    Trivial,
    Rotation(usize),
}

/// A direct sum of named terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepSpec(Vec<Term>);

impl RepSpec {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let mut terms = Vec::new();
        for raw in s.split('+') {
            let raw = raw.trim();
            let digits = raw.chars().take_while(|c| c.is_ascii_digit()).count();
            let (mult, name) = raw.split_at(digits);
            // a bare number is not a multiplier
            let (mult, name) = if name.is_empty() { ("", raw) } else { (mult, name) };
            let mult = if mult.is_empty() {
                1
            } else {
                mult.parse::<usize>()
                    .map_err(|_| CliError::Usage(format!("bad multiplier in {raw:?}")))?
            };
            let term = match name {
                "d" | "defining" => Term::Defining,
                "t" | "trivial" => Term::Trivial,
                _ => match name.strip_prefix('r').and_then(|k| k.parse::<usize>().ok()) {
                    Some(k) => Term::Rotation(k),
                    None => return Err(CliError::Usage(format!("unknown representation term {raw:?}"))),
                },
            };
            if mult == 0 {
                return Err(CliError::Usage(format!("zero multiplier in {raw:?}")));
            }
            terms.extend(std::iter::repeat_n(term, mult));
        }
        if terms.is_empty() {
            return Err(CliError::Usage("empty representation".into()));
        }
        Ok(Self(terms))
    }

    pub fn build(&self, group: &Arc<FiniteMatrixGroup>, spec: &GroupSpec) -> Result<Representation, CliError> {
        let mut acc: Option<Representation> = None;
        for term in &self.0 {
            let r = match *term {
                Term::Defining => Representation::defining(Arc::clone(group)),
                Term::Trivial => Representation::trivial(Arc::clone(group), 1),
                Term::Rotation(k) => {
                    let GroupSpec::Cyclic(n) = spec else {
                        return Err(CliError::Usage("r<k> terms need a cyclic group z<N>".into()));
                    };
                    let images = vec![rotation2(2.0 * PI * k as f64 / *n as f64)];
                    Representation::from_generator_images(Arc::clone(group), images)?
                }
            };
            acc = Some(match acc {
                None => r,
                Some(a) => direct_sum(&a, &r)?,
            });
        }
        Ok(acc.expect("nonempty"))
    }
}

/// Group and representation in one step.
pub fn build_rep(group: &str, rep: &str, dim: usize) -> Result<Representation, CliError> {
    let g = GroupSpec::parse(group)?;
    let r = RepSpec::parse(rep)?;
    let built = g.build(dim)?;
    r.build(&built, &g)
}
