//! JSON documents. Rationals are always strings `"num/den"`; JSON numbers are
//! rejected in rational fields. Every document carries `"schema": 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::de::{self, DeserializeOwned, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::certify::CertReport;
use crate::cube::DoublePoint;
use crate::error::{Error, Result};
use crate::expsum::hirota_ring;
use crate::ideal::{GeneratorMode, GeneratorSet};
use crate::main_component::{HirotaPoint, MainParams};
use crate::scalar::{format_rational, parse_rational, Rational};
use crate::soliton::{SolitonData, SolitonMatrix};

pub const SCHEMA_VERSION: u32 = 1;

/// A rational serialized as a `"num/den"` string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QStr(pub Rational);

impl Serialize for QStr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for QStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = QStr;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as a \"num/den\" string")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<QStr, E> {
                parse_rational(s).map(QStr).map_err(E::custom)
            }
        }
        d.deserialize_str(V)
    }
}

fn wrap(v: &[Rational]) -> Vec<QStr> {
    v.iter().cloned().map(QStr).collect()
}

fn unwrap(v: Vec<QStr>) -> Vec<Rational> {
    v.into_iter().map(|q| q.0).collect()
}

/// `{"schema": 1, ...body}`.
#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    schema: u32,
    #[serde(flatten)]
    body: T,
}

pub fn to_json<T: Serialize>(body: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope { schema: SCHEMA_VERSION, body })?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let env: Envelope<T> = serde_json::from_str(text).map_err(|e| Error::input(format!("malformed document: {e}")))?;
    if env.schema != SCHEMA_VERSION {
        return Err(Error::input(format!("unsupported schema version {}", env.schema)));
    }
    Ok(env.body)
}

pub fn read_file<T: DeserializeOwned>(path: &Path) -> Result<T> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn write_file<T: Serialize>(body: &T, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(body)?)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDoc {
    pub genus: usize,
    pub a: Vec<QStr>,
    pub u: Vec<QStr>,
    pub v: Vec<QStr>,
    pub w: Vec<QStr>,
}

impl From<&HirotaPoint<Rational>> for PointDoc {
    fn from(p: &HirotaPoint<Rational>) -> Self {
        PointDoc { genus: p.genus(), a: wrap(&p.a), u: wrap(&p.u), v: wrap(&p.v), w: wrap(&p.w) }
    }
}

impl PointDoc {
    pub fn into_point(self) -> Result<HirotaPoint<Rational>> {
        let g = self.genus;
        let p = HirotaPoint::new(unwrap(self.a), unwrap(self.u), unwrap(self.v), unwrap(self.w))?;
        p.check_genus(g)?;
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDoc {
    pub genus: usize,
    pub lambda: Vec<QStr>,
    pub kappa: Vec<QStr>,
}

impl From<&MainParams<Rational>> for ParamsDoc {
    fn from(p: &MainParams<Rational>) -> Self {
        ParamsDoc { genus: p.genus(), lambda: wrap(p.lambda()), kappa: wrap(p.kappa()) }
    }
}

impl ParamsDoc {
    pub fn into_params(self) -> Result<MainParams<Rational>> {
        let g = self.genus;
        let p = MainParams::new(unwrap(self.lambda), unwrap(self.kappa))?;
        if p.genus() != g {
            return Err(Error::input(format!("declared genus {g} but {} lambdas", p.genus())));
        }
        Ok(p)
    }
}

/// Subset keys are comma-separated 0-based column indices, e.g. `"0,2"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonDoc {
    pub k: usize,
    pub n: usize,
    pub kappa: Vec<QStr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<QStr>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pluecker: Option<BTreeMap<String, QStr>>,
}

fn subset_key(s: &[usize]) -> String {
    s.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn parse_subset(s: &str) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| Error::input(format!("bad subset key {s:?}"))))
        .collect()
}

impl SolitonDoc {
    pub fn from_data(d: &SolitonData<Rational>) -> Self {
        SolitonDoc {
            k: d.k(),
            n: d.n(),
            kappa: wrap(d.kappa()),
            matrix: None,
            pluecker: Some(d.pluecker().iter().map(|(s, p)| (subset_key(s), QStr(p.clone()))).collect()),
        }
    }

    pub fn from_matrix(a: &SolitonMatrix, kappa: &[Rational]) -> Self {
        SolitonDoc {
            k: a.k(),
            n: a.n(),
            kappa: wrap(kappa),
            matrix: Some(a.rows().iter().map(|r| wrap(r)).collect()),
            pluecker: None,
        }
    }

    pub fn into_data(self) -> Result<SolitonData<Rational>> {
        let kappa = unwrap(self.kappa);
        let data = match (self.matrix, self.pluecker) {
            (Some(m), None) => {
                let a = SolitonMatrix::new(m.into_iter().map(unwrap).collect())?;
                if a.k() != self.k || a.n() != self.n {
                    return Err(Error::input("matrix shape does not match k, n"));
                }
                SolitonData::from_matrix(&a, kappa)?
            }
            (None, Some(p)) => {
                let mut coords = Vec::with_capacity(p.len());
                for (key, q) in p {
                    coords.push((parse_subset(&key)?, q.0));
                }
                SolitonData::new(self.k, self.n, kappa, coords)?
            }
            _ => return Err(Error::input("give exactly one of \"matrix\" or \"pluecker\"")),
        };
        Ok(data)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    /// Variable name → exponent.
    pub monomial: BTreeMap<String, u32>,
    pub coeff: QStr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub label: String,
    pub uniquely_attained: bool,
    pub polynomial: String,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSetDoc {
    pub genus: usize,
    pub mode: String,
    pub count: usize,
    pub generators: Vec<GeneratorDoc>,
}

impl GeneratorSetDoc {
    pub fn from_set(set: &GeneratorSet) -> Result<Self> {
        let ring = hirota_ring(set.genus())?;
        let generators = set
            .generators()
            .iter()
            .map(|gen| {
                let poly = gen.to_polynomial(&ring)?;
                let terms = poly
                    .sorted_terms()
                    .into_iter()
                    .map(|(m, c)| TermDoc {
                        monomial: m.exponents().map(|(v, e)| (ring.name(v).to_string(), e)).collect(),
                        coeff: QStr(c.clone()),
                    })
                    .collect();
                Ok(GeneratorDoc {
                    label: gen.label().to_string(),
                    uniquely_attained: gen.is_uniquely_attained(),
                    polynomial: poly.to_string(),
                    terms,
                })
            })
            .collect::<Result<_>>()?;
        Ok(GeneratorSetDoc { genus: set.genus(), mode: set.mode().name().to_string(), count: set.len(), generators })
    }

    /// Rebuilds the set from the labels and checks the stored terms against it.
    pub fn into_set(self) -> Result<GeneratorSet> {
        let mode: GeneratorMode = self.mode.parse()?;
        let labels = self.generators.iter().map(|g| DoublePoint::parse(&g.label)).collect::<Result<Vec<_>>>()?;
        if self.count != labels.len() {
            return Err(Error::input("count does not match the number of generators"));
        }
        let set = GeneratorSet::from_labels(self.genus, mode, &labels)?;
        let rebuilt = GeneratorSetDoc::from_set(&set)?;
        for (stored, fresh) in self.generators.iter().zip(&rebuilt.generators) {
            if stored.terms != fresh.terms {
                return Err(Error::input(format!("terms of generator {} do not match its label", stored.label)));
            }
        }
        Ok(set)
    }
}

pub fn point_json(p: &HirotaPoint<Rational>) -> Result<String> {
    to_json(&PointDoc::from(p))
}

pub fn parse_point(text: &str) -> Result<HirotaPoint<Rational>> {
    from_json::<PointDoc>(text)?.into_point()
}

pub fn params_json(p: &MainParams<Rational>) -> Result<String> {
    to_json(&ParamsDoc::from(p))
}

pub fn parse_params(text: &str) -> Result<MainParams<Rational>> {
    from_json::<ParamsDoc>(text)?.into_params()
}

pub fn soliton_json(d: &SolitonData<Rational>) -> Result<String> {
    to_json(&SolitonDoc::from_data(d))
}

pub fn parse_soliton(text: &str) -> Result<SolitonData<Rational>> {
    from_json::<SolitonDoc>(text)?.into_data()
}

pub fn generators_json(set: &GeneratorSet) -> Result<String> {
    to_json(&GeneratorSetDoc::from_set(set)?)
}

pub fn parse_generators(text: &str) -> Result<GeneratorSet> {
    from_json::<GeneratorSetDoc>(text)?.into_set()
}

pub fn report_json(r: &CertReport) -> Result<String> {
    to_json(r)
}

pub fn parse_report(text: &str) -> Result<CertReport> {
    from_json(text)
}

pub fn read_point(path: &Path) -> Result<HirotaPoint<Rational>> {
    parse_point(&std::fs::read_to_string(path)?)
}

pub fn write_report(r: &CertReport, path: &Path) -> Result<()> {
    write_file(r, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{certify_main_component, CertMode};
    use crate::ideal::all_generators;
    use crate::main_component::phi;
    use crate::sampling::{random_full_rank_matrix, random_main_params, rng_from_seed};
    use crate::scalar::rational;

    #[test]
    fn point_round_trip() {
        let p = phi(&random_main_params(&mut rng_from_seed(1), 3).unwrap());
        let text = point_json(&p).unwrap();
        assert!(text.contains("\"schema\": 1"));
        assert_eq!(parse_point(&text).unwrap(), p);
    }

    #[test]
    fn normalizes_and_rejects_floats() {
        let text = r#"{"schema":1,"genus":1,"a":["3/6","2"],"u":["2"],"v":["8"],"w":["26"]}"#;
        let p = parse_point(text).unwrap();
        assert_eq!(p.a[0], rational(1, 2));
        assert!(point_json(&p).unwrap().contains("\"1/2\""));
        assert!(point_json(&p).unwrap().contains("\"2/1\""));
        let float = r#"{"schema":1,"genus":1,"a":[0.5,"2"],"u":["2"],"v":["8"],"w":["26"]}"#;
        assert!(matches!(parse_point(float), Err(Error::InvalidInput(_))));
        let decimal = r#"{"schema":1,"genus":1,"a":["0.5","2"],"u":["2"],"v":["8"],"w":["26"]}"#;
        assert!(parse_point(decimal).is_err());
        let version = r#"{"schema":2,"genus":1,"a":["1","2"],"u":["2"],"v":["8"],"w":["26"]}"#;
        assert!(parse_point(version).is_err());
        let genus = r#"{"schema":1,"genus":2,"a":["1","2"],"u":["2"],"v":["8"],"w":["26"]}"#;
        assert!(parse_point(genus).is_err());
    }

    #[test]
    fn other_round_trips() {
        let mut rng = rng_from_seed(2);
        let params = random_main_params(&mut rng, 2).unwrap();
        assert_eq!(parse_params(&params_json(&params).unwrap()).unwrap(), params);

        let a = random_full_rank_matrix(&mut rng, 2, 4).unwrap();
        let kappa = vec![rational(1, 1), rational(2, 1), rational(3, 1), rational(5, 1)];
        let d = SolitonData::from_matrix(&a, kappa.clone()).unwrap();
        assert_eq!(parse_soliton(&soliton_json(&d).unwrap()).unwrap(), d);
        let from_matrix = to_json(&SolitonDoc::from_matrix(&a, &kappa)).unwrap();
        assert_eq!(parse_soliton(&from_matrix).unwrap(), d);

        let set = all_generators(3, GeneratorMode::PerPoint).unwrap();
        assert_eq!(parse_generators(&generators_json(&set).unwrap()).unwrap(), set);

        let r = certify_main_component(2, 5, CertMode::Exact).unwrap();
        assert_eq!(parse_report(&report_json(&r).unwrap()).unwrap(), r);
    }
}
