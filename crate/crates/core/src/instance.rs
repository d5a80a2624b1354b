//! Loading problem files into checked proofs.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::kernel::{check_proof, elaborate_problem, Problem, Proof, Signature};

/// An elaborated problem.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub signature: Signature,
    pub proof: Proof,
}

impl Instance {
    pub fn parse(src: &str) -> Result<Instance> {
        let problem = Problem::parse(src)?;
        let proof = elaborate_problem(&problem)?;
        Ok(Instance { name: problem.name, signature: problem.signature, proof })
    }

    pub fn load(path: &Path) -> Result<Instance> {
        let src = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Instance::parse(&src)
    }

    /// Fails with [`Error::InvalidProof`] listing the violations, if any.
    pub fn validated(self) -> Result<Instance> {
        let report = check_proof(&self.proof, Some(&self.signature));
        if report.is_empty() {
            Ok(self)
        } else {
            let msgs: Vec<String> = report.iter().map(ToString::to_string).collect();
            Err(Error::InvalidProof(format!("{}: {}", self.name, msgs.join("; "))))
        }
    }
}

/// Files ending in `.proof` under `dir`, in sorted filename order.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "proof"))
        .collect();
    files.sort();
    Ok(files)
}
