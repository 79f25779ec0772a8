use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::subloop::generate_modulo;
use super::{Fraction, StructuredCML, StructuredElement, StructuredSubloop};
use crate::catalog;
use crate::error::{Error, Result};
use crate::loops::CayleyLoop;

/// `{"summands":[3,5],"finite_part":{"file":"c.tbl"}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuredDescriptor {
    #[serde(default)]
    pub summands: Vec<u64>,
    pub finite_part: FinitePartDescriptor,
}

/// Where the finite part comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum FinitePartDescriptor {
    File { file: String },
    Builtin { builtin: String },
    Rows { rows: Vec<Vec<usize>> },
}

impl StructuredDescriptor {
    pub fn from_json(text: &str) -> Result<StructuredDescriptor> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("structured descriptor: {e}")))
    }

    /// Builds the loop; table files are resolved relative to `base`.
    pub fn load(&self, base: &Path) -> Result<StructuredCML> {
        let finite = match &self.finite_part {
            FinitePartDescriptor::File { file } => {
                let path = base.join(file);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                CayleyLoop::parse(&text)?
            }
            FinitePartDescriptor::Builtin { builtin } => catalog::builtin(builtin)?,
            FinitePartDescriptor::Rows { rows } => CayleyLoop::from_rows(rows)?,
        };
        StructuredCML::new(self.summands.clone(), finite)
    }
}

/// `{"div":["1/9","0"],"fin":7}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDescriptor {
    pub div: Vec<String>,
    pub fin: usize,
}

impl ElementDescriptor {
    pub fn to_element(&self, q: &StructuredCML) -> Result<StructuredElement> {
        let div = self
            .div
            .iter()
            .map(|s| s.parse::<Fraction>())
            .collect::<Result<Vec<_>>>()?;
        q.element(div, self.fin)
    }

    pub fn from_element(a: &StructuredElement) -> ElementDescriptor {
        ElementDescriptor {
            div: a.div.iter().map(Fraction::to_string).collect(),
            fin: a.fin,
        }
    }
}

/// `{"full":[0],"residual_gens":[…]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubloopDescriptor {
    #[serde(default)]
    pub full: Vec<usize>,
    #[serde(default)]
    pub residual_gens: Vec<ElementDescriptor>,
}

impl SubloopDescriptor {
    pub fn from_json(text: &str) -> Result<SubloopDescriptor> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("subloop descriptor: {e}")))
    }

    /// The subloop generated by the whole summands and the residual generators.
    pub fn to_subloop(&self, q: &StructuredCML, cap: usize) -> Result<StructuredSubloop> {
        let full: BTreeSet<usize> = self.full.iter().copied().collect();
        if let Some(&i) = full.iter().find(|&&i| i >= q.rank()) {
            return Err(Error::InvalidParams(format!("no summand {i}")));
        }
        let gens = self
            .residual_gens
            .iter()
            .map(|g| g.to_element(q))
            .collect::<Result<Vec<_>>>()?;
        generate_modulo(q, &full, &gens, cap)
    }

    pub fn from_subloop(q: &StructuredCML, h: &StructuredSubloop) -> SubloopDescriptor {
        SubloopDescriptor {
            full: h.full().iter().copied().collect(),
            residual_gens: h.generators(q).iter().map(ElementDescriptor::from_element).collect(),
        }
    }
}
