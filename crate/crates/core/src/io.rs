//! JSON interchange for IETs:
//! `{"basis": [2, 3], "lengths": [Scalar, …], "perm": [-7, 6, …]}` with an
//! optional `expected` block.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{Construction, Expected};
use crate::iet::{Iet, IetError};
use crate::perm::{PermError, SignedPermutation};
use crate::scalar::{Basis, Scalar, ScalarError, ScalarRepr};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Iet(#[from] IetError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IetFile {
    pub basis: Vec<u64>,
    pub lengths: Vec<ScalarRepr>,
    pub perm: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

impl IetFile {
    pub fn from_iet(t: &Iet) -> IetFile {
        IetFile {
            basis: t.basis().radicands().to_vec(),
            lengths: t.lengths().iter().map(Scalar::to_repr).collect(),
            perm: t.perm().entries().to_vec(),
            expected: None,
        }
    }

    pub fn from_construction(c: &Construction) -> Result<IetFile, IetError> {
        let t = Iet::new(c.lengths.clone(), c.perm.clone())?;
        Ok(IetFile { expected: Some(c.expected), ..IetFile::from_iet(&t) })
    }

    pub fn to_iet(&self) -> Result<Iet, IoError> {
        let basis = Basis::new(self.basis.clone())?;
        let lengths = self.lengths.iter().map(|r| Scalar::from_repr(&basis, r)).collect::<Result<Vec<_>, _>>()?;
        let perm = SignedPermutation::new(self.perm.clone())?;
        Ok(Iet::new(lengths, perm)?)
    }

    pub fn parse(text: &str) -> Result<IetFile, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}
