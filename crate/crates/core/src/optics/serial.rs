//! Text form of an [`OpticalNetwork`].
//!
//! A JSON object with one element per line:
//!
//! ```text
//! {"schema":1,"modes":4,"elements":[
//! {"bs":[0,1,[[0.7071067811865476,0.0],[0.0,0.7071067811865476],[0.0,0.7071067811865476],[0.7071067811865476,0.0]]]},
//! {"ph":[2,1.5707963267948966]},
//! {"cp":[1,2,3.141592653589793]}
//! ]}
//! ```
//!
//! Beamsplitter blocks are listed row-major as `[re, im]` pairs.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Element, OpticalNetwork};
use crate::error::{Error, Result};

pub const NETWORK_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    pub schema: u32,
    pub modes: usize,
    pub elements: Vec<ElementRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ElementRecord {
    #[serde(rename = "bs")]
    Beamsplitter(usize, usize, [[f64; 2]; 4]),
    #[serde(rename = "ph")]
    Phase(usize, f64),
    #[serde(rename = "cp")]
    Cphase(usize, usize, f64),
}

impl NetworkDocument {
    pub fn from_network(net: &OpticalNetwork) -> Self {
        let elements = net
            .elements()
            .iter()
            .map(|e| match e {
                Element::Beamsplitter {
                    modes: (i, j),
                    block,
                } => {
                    let mut entries = [[0.0; 2]; 4];
                    for (slot, z) in entries.iter_mut().zip(block.iter()) {
                        *slot = [z.re, z.im];
                    }
                    ElementRecord::Beamsplitter(*i, *j, entries)
                }
                Element::Phase { mode, phase } => ElementRecord::Phase(*mode, *phase),
                Element::Cphase {
                    modes: (i, j),
                    phase,
                } => ElementRecord::Cphase(*i, *j, *phase),
            })
            .collect();
        NetworkDocument {
            schema: NETWORK_SCHEMA_VERSION,
            modes: net.mode_count(),
            elements,
        }
    }

    pub fn to_network(&self) -> Result<OpticalNetwork> {
        if self.schema != NETWORK_SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "network schema {} is not supported (expected {NETWORK_SCHEMA_VERSION})",
                self.schema
            )));
        }
        let elements = self
            .elements
            .iter()
            .map(|r| match r {
                ElementRecord::Beamsplitter(i, j, entries) => {
                    let values = entries
                        .iter()
                        .map(|[re, im]| Complex64::new(*re, *im))
                        .collect();
                    Element::beamsplitter(
                        *i,
                        *j,
                        Array2::from_shape_vec((2, 2), values).expect("2x2"),
                    )
                }
                ElementRecord::Phase(i, p) => Element::phase(*i, *p),
                ElementRecord::Cphase(i, j, p) => Element::cphase(*i, *j, *p),
            })
            .collect();
        OpticalNetwork::new(self.modes, elements)
    }

    /// Parses and validates a network. Syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<OpticalNetwork> {
        let doc: NetworkDocument = serde_json::from_str(text)
            .map_err(|e| Error::Validation(format!("network file: {e}")))?;
        doc.to_network()
    }

    pub fn render(net: &OpticalNetwork) -> String {
        let doc = NetworkDocument::from_network(net);
        let mut out = format!(
            "{{\"schema\":{},\"modes\":{},\"elements\":[",
            doc.schema, doc.modes
        );
        for (k, e) in doc.elements.iter().enumerate() {
            out.push_str(if k == 0 { "\n" } else { ",\n" });
            out.push_str(&serde_json::to_string(e).expect("records serialize"));
        }
        out.push_str("\n]}\n");
        out
    }
}
