//! Text format for finite measures.
//!
//! ```text
//! # comment
//! primes: [2,3]
//! kind: group
//! w=1/4 r=1 s=[1,0]
//! ```
//!
//! `kind` is `group` (atoms `w= r= s=`), `integers` or `sintegers` (atoms `w= r=`).

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use super::design::parse_rational;
use super::FiniteMeasure;
use crate::error::{Error, Result};
use crate::group::AffineElement;
use crate::sarith::{PrimeSet, SInteger, SUnit};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeasureFile {
    Group(FiniteMeasure<AffineElement>),
    Integers(PrimeSet, FiniteMeasure<i64>),
    SIntegers(PrimeSet, FiniteMeasure<SInteger>),
}

impl MeasureFile {
    pub fn kind(&self) -> &'static str {
        match self {
            MeasureFile::Group(_) => "group",
            MeasureFile::Integers(..) => "integers",
            MeasureFile::SIntegers(..) => "sintegers",
        }
    }

    pub fn primes(&self) -> &PrimeSet {
        match self {
            MeasureFile::Group(m) => m.support().next().expect("non-empty measure").primes(),
            MeasureFile::Integers(p, _) | MeasureFile::SIntegers(p, _) => p,
        }
    }

    pub fn into_group(self) -> Result<FiniteMeasure<AffineElement>> {
        match self {
            MeasureFile::Group(m) => Ok(m),
            other => Err(Error::InvalidArgument(format!("expected a group measure, found kind `{}`", other.kind()))),
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("primes: {}\nkind: {}\n", render_primes(self.primes()), self.kind());
        match self {
            MeasureFile::Group(m) => {
                for (g, w) in m.iter() {
                    let _ = writeln!(out, "w={w} r={} s={}", g.r, g.s);
                }
            }
            MeasureFile::Integers(_, m) => {
                for (x, w) in m.iter() {
                    let _ = writeln!(out, "w={w} r={x}");
                }
            }
            MeasureFile::SIntegers(_, m) => {
                for (x, w) in m.iter() {
                    let _ = writeln!(out, "w={w} r={x}");
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut primes: Option<PrimeSet> = None;
        let mut kind: Option<String> = None;
        let mut atoms: Vec<(usize, Atom)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("primes:") {
                let inner = rest.trim().trim_start_matches('[').trim_end_matches(']');
                primes = Some(PrimeSet::parse(inner).map_err(|e| err(e.to_string()))?);
            } else if let Some(rest) = line.strip_prefix("kind:") {
                let k = rest.trim().trim_matches('"');
                if !matches!(k, "group" | "integers" | "sintegers") {
                    return Err(err(format!("unknown kind `{k}` (expected group, integers or sintegers)")));
                }
                kind = Some(k.to_string());
            } else if line.starts_with("w=") {
                atoms.push((line_no, Atom::parse(line).map_err(err)?));
            } else {
                return Err(err(format!("unrecognized line `{line}`")));
            }
        }
        let end = text.lines().count().max(1);
        let primes = primes.ok_or(Error::Parse { line: end, msg: "missing `primes:` header".into() })?;
        let kind = kind.ok_or(Error::Parse { line: end, msg: "missing `kind:` header".into() })?;
        if atoms.is_empty() {
            return Err(Error::Parse { line: end, msg: "empty atom list".into() });
        }
        match kind.as_str() {
            "group" => {
                let mut m = FiniteMeasure::new();
                for (line, a) in atoms {
                    let err = |msg: String| Error::Parse { line, msg };
                    let s = a.s.as_deref().ok_or_else(|| err("group atom needs `s=[...]`".into()))?;
                    let r = SInteger::parse(&primes, &a.r).map_err(|e| err(e.to_string()))?;
                    let s = SUnit::parse(&primes, s).map_err(|e| err(e.to_string()))?;
                    insert(&mut m, AffineElement::new(r, s), a.w, line)?;
                }
                Ok(MeasureFile::Group(m))
            }
            "integers" => {
                let mut m = FiniteMeasure::new();
                for (line, a) in atoms {
                    let x: i64 = a.r.parse().map_err(|_| Error::Parse { line, msg: format!("`{}` is not an integer", a.r) })?;
                    no_dilation(&a, line)?;
                    insert(&mut m, x, a.w, line)?;
                }
                Ok(MeasureFile::Integers(primes, m))
            }
            _ => {
                let mut m = FiniteMeasure::new();
                for (line, a) in atoms {
                    no_dilation(&a, line)?;
                    let x = SInteger::parse(&primes, &a.r).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
                    insert(&mut m, x, a.w, line)?;
                }
                Ok(MeasureFile::SIntegers(primes, m))
            }
        }
    }
}

fn render_primes(p: &PrimeSet) -> String {
    let items: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(","))
}

struct Atom {
    w: BigRational,
    r: String,
    s: Option<String>,
}

impl Atom {
    fn parse(line: &str) -> std::result::Result<Self, String> {
        // `s=[...]` may contain spaces, so cut it out first.
        let (rest, s) = match line.find("s=[") {
            Some(start) => {
                let end = line[start..].find(']').ok_or("unterminated `s=[`")? + start;
                (format!("{} {}", &line[..start], &line[end + 1..]), Some(line[start + 2..=end].to_string()))
            }
            None => (line.to_string(), None),
        };
        let (mut w, mut r) = (None, None);
        for tok in rest.split_whitespace() {
            match tok.split_once('=') {
                Some(("w", v)) => w = Some(parse_rational(v).ok_or(format!("`{v}` is not a rational weight"))?),
                Some(("r", v)) => r = Some(v.to_string()),
                _ => return Err(format!("unexpected token `{tok}`")),
            }
        }
        let w = w.ok_or("missing `w=`")?;
        if !w.is_positive() {
            return Err(format!("weight {w} is not positive"));
        }
        Ok(Self { w, r: r.unwrap_or_else(|| BigInt::from(0).to_string()), s })
    }
}

fn no_dilation(a: &Atom, line: usize) -> Result<()> {
    match a.s {
        Some(_) => Err(Error::Parse { line, msg: "`s=` is only allowed for kind `group`".into() }),
        None => Ok(()),
    }
}

fn insert<C: Ord + Clone>(m: &mut FiniteMeasure<C>, c: C, w: BigRational, line: usize) -> Result<()> {
    if m.contains(&c) {
        return Err(Error::Parse { line, msg: "duplicate atom".into() });
    }
    m.add(c, w);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{design_tau, q, DesignConfig};

    #[test]
    fn designed_measure_round_trips() {
        let ps = PrimeSet::new(vec![2, 3]).unwrap();
        let tau = design_tau(&ps, &DesignConfig::new(&ps, vec![q(1, 1), q(1, 1)])).unwrap().tau;
        let file = MeasureFile::Group(tau);
        let text = file.render();
        assert!(text.starts_with("primes: [2,3]\nkind: group\n"));
        assert_eq!(MeasureFile::parse(&text).unwrap(), file);
    }

    #[test]
    fn parses_comments_and_spacing() {
        let text = "# a Dirac mass\nprimes: [2]\nkind: \"group\"\n\nw=1 r=1 s=[ 1 ]  # (1,2)\n";
        let m = MeasureFile::parse(text).unwrap().into_group().unwrap();
        assert_eq!(m.len(), 1);
        let ints = MeasureFile::parse("primes: [2]\nkind: integers\nw=3/4 r=1\nw=1/4 r=-1\n").unwrap();
        assert_eq!(MeasureFile::parse(&ints.render()).unwrap(), ints);
        let sints = MeasureFile::parse("primes: [2,3]\nkind: sintegers\nw=1 r=5/6\n").unwrap();
        assert_eq!(MeasureFile::parse(&sints.render()).unwrap(), sints);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let empty = MeasureFile::parse("primes: [2,3]\nkind: group\n").unwrap_err();
        assert!(matches!(empty, Error::Parse { ref msg, .. } if msg == "empty atom list"), "{empty}");
        let bad = MeasureFile::parse("primes: [2,3]\nkind: group\nw=1/2 r=1 s=[1,0]\nw=x r=1 s=[0,0]\n").unwrap_err();
        assert!(matches!(bad, Error::Parse { line: 4, .. }), "{bad}");
        let bad_s = MeasureFile::parse("primes: [2,3]\nkind: group\nw=1 r=1 s=[1]\n").unwrap_err();
        assert!(matches!(bad_s, Error::Parse { line: 3, .. }));
        let not_s_int = MeasureFile::parse("primes: [2]\nkind: group\nw=1 r=1/3 s=[1]\n").unwrap_err();
        assert!(matches!(not_s_int, Error::Parse { line: 3, .. }));
        let dup = MeasureFile::parse("primes: [2]\nkind: integers\nw=1/2 r=1\nw=1/2 r=1\n").unwrap_err();
        assert!(matches!(dup, Error::Parse { line: 4, .. }));
        assert!(matches!(MeasureFile::parse("kind: group\nw=1 r=0 s=[0]\n"), Err(Error::Parse { .. })));
    }
}
