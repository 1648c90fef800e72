use serde::{Deserialize, Serialize};

use super::SchottkyGroup;
use crate::error::{Error, Result};
use crate::mobius::{Disk, MoebiusElement};

/// JSON description of a group.
///
/// ```json
/// {"type": "three_funnel", "lengths": [6, 6, 6]}
/// {"type": "matrices", "generators": [[a, b, c, d]], "disks": [[c_minus, r_minus, c_plus, r_plus]]}
/// ```
///
/// `disks` may be omitted, in which case the isometric disks are used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    ThreeFunnel {
        lengths: [f64; 3],
    },
    Cylinder {
        length: f64,
    },
    Matrices {
        generators: Vec<[f64; 4]>,
        #[serde(default)]
        disks: Option<Vec<[f64; 4]>>,
    },
}

impl GroupSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("group spec: {e}")))
    }

    pub fn build(&self) -> Result<SchottkyGroup> {
        match self {
            GroupSpec::ThreeFunnel { lengths } => SchottkyGroup::three_funnel(lengths[0], lengths[1], lengths[2]),
            GroupSpec::Cylinder { length } => SchottkyGroup::cylinder(*length),
            GroupSpec::Matrices { generators, disks } => {
                let gens = generators
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        MoebiusElement::new(m[0], m[1], m[2], m[3])
                            .map_err(|e| Error::InvalidInput(format!("generators[{i}]: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let group = match disks {
                    None => SchottkyGroup::with_isometric_disks(gens)?,
                    Some(d) => {
                        let pairs = d
                            .iter()
                            .enumerate()
                            .map(|(i, q)| {
                                let wrap = |e: Error| Error::InvalidInput(format!("disks[{i}]: {e}"));
                                Ok((
                                    Disk::new(q[0], q[1]).map_err(wrap)?,
                                    Disk::new(q[2], q[3]).map_err(wrap)?,
                                ))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        SchottkyGroup::from_parts(gens, pairs)?
                    }
                };
                group.validate().into_result()?;
                Ok(group)
            }
        }
    }
}
