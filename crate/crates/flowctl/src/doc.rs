//! JSON flow documents.

use linflow::algflow::AlgebraicFlow;
use linflow::gfp::{Matrix, PrimeField};
use linflow::polymat::{ModulePresentation, Poly, PolyMatrix};
use linflow::topflow::{Block, ProfiniteFlow};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowDocument {
    pub field: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(flatten)]
    pub payload: Payload,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Payload {
    Findim {
        action: Vec<Vec<i64>>,
    },
    Module {
        generators: usize,
        /// `generators` rows of ascending coefficient lists; empty for a free module.
        #[serde(default)]
        relations: Vec<Vec<Vec<i64>>>,
    },
    Profinite(ProfiniteDoc),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfiniteDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bernoulli: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_of: Option<DualDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub preperiod: Vec<BlockDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub period: Vec<BlockDoc>,
}

/// Dual of `⊕ K[t]/(d_i) ⊕ K[t]^free`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualDoc {
    pub factors: Vec<Vec<i64>>,
    #[serde(default)]
    pub free: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDoc {
    pub dim: usize,
    /// `π : V_{n+1} → V_n`; only truncations are supported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<Vec<Vec<i64>>>,
    pub action: Vec<Vec<i64>>,
}

/// A parsed document.
#[derive(Clone, Debug)]
pub enum Flow {
    FinDim(Matrix),
    Module(ModulePresentation),
    Profinite(ProfiniteFlow),
}

impl Flow {
    pub fn kind(&self) -> &'static str {
        match self {
            Flow::FinDim(_) => "findim",
            Flow::Module(_) => "module",
            Flow::Profinite(_) => "profinite",
        }
    }

    pub fn algebraic(&self) -> Option<AlgebraicFlow> {
        match self {
            Flow::FinDim(a) => AlgebraicFlow::findim(a.clone()).ok(),
            Flow::Module(w) => Some(AlgebraicFlow::module(w.clone())),
            Flow::Profinite(_) => None,
        }
    }

    /// The topological flow this document stands for: a findim action as
    /// itself, a module through its dual.
    pub fn topological(&self) -> Result<ProfiniteFlow, Failure> {
        match self {
            Flow::FinDim(a) => ProfiniteFlow::findim(a.clone()).map_err(Failure::parse),
            Flow::Module(w) => Ok(linflow::duality::dual_of_module(w)
                .map_err(Failure::internal)?
                .flow()
                .clone()),
            Flow::Profinite(v) => Ok(v.clone()),
        }
    }
}

fn matrix(field: PrimeField, cols: usize, rows: &[Vec<i64>]) -> Result<Matrix, Failure> {
    Matrix::from_rows_with_cols(field, rows, cols).map_err(Failure::parse)
}

fn reduce_rows(field: PrimeField, rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| field.reduce(x) as i64).collect())
        .collect()
}

fn reduce_poly(field: PrimeField, c: &[i64]) -> Vec<i64> {
    Poly::from_coeffs(field, c)
        .coeffs()
        .iter()
        .map(|&x| x as i64)
        .collect()
}

impl FlowDocument {
    pub fn from_json(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn parse(&self) -> Result<Flow, Failure> {
        let f = PrimeField::new(self.field).map_err(Failure::parse)?;
        match &self.payload {
            Payload::Findim { action } => {
                let n = action.len();
                Ok(Flow::FinDim(matrix(f, n, action)?))
            }
            Payload::Module {
                generators,
                relations,
            } => {
                let rel = if relations.is_empty() {
                    PolyMatrix::zeros(f, *generators, 0)
                } else {
                    if relations.len() != *generators {
                        return Err(Failure::Parse(format!(
                            "relations must have {generators} rows, found {}",
                            relations.len()
                        )));
                    }
                    PolyMatrix::from_coeff_rows(f, relations).map_err(Failure::parse)?
                };
                Ok(Flow::Module(
                    ModulePresentation::new(f, *generators, rel).map_err(Failure::parse)?,
                ))
            }
            Payload::Profinite(p) => Ok(Flow::Profinite(p.parse(f)?)),
        }
    }

    /// Residues reduced into `[0, p)`, polynomials trimmed, redundant
    /// fields dropped.
    pub fn canonical(&self) -> Result<FlowDocument, Failure> {
        self.parse()?;
        let f = PrimeField::new(self.field).map_err(Failure::parse)?;
        let payload = match &self.payload {
            Payload::Findim { action } => Payload::Findim {
                action: reduce_rows(f, action),
            },
            Payload::Module {
                generators,
                relations,
            } => {
                let relations: Vec<Vec<Vec<i64>>> = relations
                    .iter()
                    .map(|r| r.iter().map(|c| reduce_poly(f, c)).collect())
                    .collect();
                let empty = relations.iter().all(Vec::is_empty);
                Payload::Module {
                    generators: *generators,
                    relations: if empty { Vec::new() } else { relations },
                }
            }
            Payload::Profinite(p) => {
                let block = |b: &BlockDoc| BlockDoc {
                    dim: b.dim,
                    projection: None,
                    action: reduce_rows(f, &b.action),
                };
                Payload::Profinite(ProfiniteDoc {
                    bernoulli: p.bernoulli,
                    dual_of: p.dual_of.as_ref().map(|d| DualDoc {
                        factors: d.factors.iter().map(|c| reduce_poly(f, c)).collect(),
                        free: d.free,
                    }),
                    window: if p.preperiod.is_empty() && p.period.is_empty() {
                        None
                    } else {
                        Some(p.window.unwrap_or(1))
                    },
                    preperiod: p.preperiod.iter().map(block).collect(),
                    period: p.period.iter().map(block).collect(),
                })
            }
        };
        Ok(FlowDocument {
            field: self.field,
            label: self.label.clone(),
            payload,
        })
    }
}

impl ProfiniteDoc {
    fn parse(&self, f: PrimeField) -> Result<ProfiniteFlow, Failure> {
        let periodic = !self.preperiod.is_empty() || !self.period.is_empty();
        let forms = usize::from(self.bernoulli.is_some())
            + usize::from(self.dual_of.is_some())
            + usize::from(periodic);
        if forms != 1 {
            return Err(Failure::Parse(
                "a profinite document needs exactly one of bernoulli, dual_of, or preperiod/period blocks".into(),
            ));
        }
        if let Some(k) = self.bernoulli {
            return Ok(ProfiniteFlow::bernoulli(f, k));
        }
        if let Some(d) = &self.dual_of {
            let factors: Vec<Poly> = d.factors.iter().map(|c| Poly::from_coeffs(f, c)).collect();
            return ProfiniteFlow::dual_of_module(f, &factors, d.free).map_err(Failure::parse);
        }
        let window = self.window.unwrap_or(1);
        let blocks: Vec<&BlockDoc> = self.preperiod.iter().chain(&self.period).collect();
        let mut offset = 0;
        for (n, b) in blocks.iter().enumerate() {
            if let Some(p) = &b.projection {
                check_truncation(p, offset, offset + b.dim)
                    .map_err(|why| Failure::Unsupported(format!("block {n}: {why}")))?;
            }
            offset += b.dim;
        }
        let to_block = |b: &BlockDoc| -> Result<Block, Failure> {
            let cols = b.action.first().map_or(0, Vec::len);
            Ok(Block {
                dim: b.dim,
                action: matrix(f, cols, &b.action)?,
            })
        };
        let pre = self
            .preperiod
            .iter()
            .map(to_block)
            .collect::<Result<_, _>>()?;
        let per = self.period.iter().map(to_block).collect::<Result<_, _>>()?;
        ProfiniteFlow::periodic(f, window, pre, per).map_err(Failure::parse)
    }
}

/// `[I_rows | 0]` of shape `rows × cols`.
fn check_truncation(p: &[Vec<i64>], rows: usize, cols: usize) -> Result<(), String> {
    if p.len() != rows || p.iter().any(|r| r.len() != cols) {
        return Err(format!("projection must be {rows}x{cols}"));
    }
    let ok = p
        .iter()
        .enumerate()
        .all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == i64::from(i == j)));
    if ok {
        Ok(())
    } else {
        Err("only coordinate truncations are supported as projections".into())
    }
}
