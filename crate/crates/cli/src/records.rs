//! Serializable views of core results. Field order here is the JSON key
//! order, so outputs are byte-stable.

use serde::{Deserialize, Serialize};

use modfol_core::algebra::QMatrix;
use modfol_core::congruence::CurveData;
use modfol_core::eigen::EigenformOrbit;
use modfol_core::foliation::FoliationClass;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    #[serde(rename = "N")]
    pub n: u64,
    pub mu: u64,
    pub nu2: u64,
    pub nu3: u64,
    pub nu_inf: u64,
    pub genus: u64,
}

impl From<&CurveData> for CurveRecord {
    fn from(c: &CurveData) -> Self {
        Self {
            n: c.level.get(),
            mu: c.index_mu,
            nu2: c.nu2,
            nu3: c.nu3,
            nu_inf: c.nu_inf,
            genus: c.genus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeCoefficient {
    pub p: u64,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub orbit: usize,
    pub degree: usize,
    /// Minimal polynomial of the field generator, in `x`.
    pub field: String,
    pub defining_prime: u64,
    /// Decimal approximation of the embedded generator.
    pub embedding_root: String,
    pub multiplicity: usize,
    pub possibly_old: bool,
    /// Hecke eigenvalues as polynomials in the generator `x`.
    pub coefficients: Vec<PrimeCoefficient>,
}

impl OrbitRecord {
    pub fn new(index: usize, o: &EigenformOrbit) -> Self {
        Self {
            orbit: index,
            degree: o.degree,
            field: o.field.minimal_polynomial().to_string_var("x"),
            defining_prime: o.defining_prime,
            embedding_root: o.embedding.root_f64().to_string(),
            multiplicity: o.multiplicity,
            possibly_old: o.possibly_old,
            coefficients: o
                .coefficient_map
                .iter()
                .map(|(&p, c)| PrimeCoefficient {
                    p,
                    value: c.to_string_var("x"),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub level: u64,
    pub orbit: usize,
    pub degree: usize,
    pub genus: u64,
    pub class: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub separatrix_excess: Option<u64>,
}

impl ClassRecord {
    pub fn new(level: u64, orbit: usize, c: &FoliationClass) -> Self {
        Self {
            level,
            orbit,
            degree: c.degree,
            genus: c.genus,
            class: c.kind.as_str().to_string(),
            separatrix_excess: c.separatrix_excess,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeckeRecord {
    pub p: u64,
    /// Rows of the matrix on the cuspidal space, entries as `a/b`.
    pub rows: Vec<Vec<String>>,
}

impl HeckeRecord {
    pub fn new(p: u64, m: &QMatrix) -> Self {
        Self {
            p,
            rows: (0..m.rows())
                .map(|i| m.row(i).iter().map(|x| x.to_string()).collect())
                .collect(),
        }
    }
}

/// Everything computed for one level by the default pipeline; this is the
/// unit stored in the cache.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub curve: CurveRecord,
    pub ambient_dimension: usize,
    pub cuspidal_dimension: usize,
    pub primes: Vec<u64>,
    pub hecke: Vec<HeckeRecord>,
    pub orbits: Vec<OrbitRecord>,
    pub classes: Vec<ClassRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecomposeOutput<'a> {
    #[serde(rename = "N")]
    pub n: u64,
    pub genus: u64,
    pub cuspidal_dimension: usize,
    pub primes: &'a [u64],
    pub orbits: &'a [OrbitRecord],
}
