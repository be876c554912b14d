//! Code files: a graph, a linear mother code and, for folded codes, the
//! second branch.

use std::path::Path;

use anyhow::{bail, Context, Result};
use dispersa_core::bigraph::GraphFile;
use dispersa_core::mothercode::{CodeFile, InnerCode, InnerCodeFile};
use dispersa_core::{BipartiteGraph, FoldedCode, GraphCode, LinearCode};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeBundle {
    pub graph: GraphFile,
    pub mother: CodeFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub folded: Option<FoldedBranch>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoldedBranch {
    pub graph: GraphFile,
    pub inner: InnerCodeFile,
}

#[allow(clippy::large_enum_variant)]
pub enum Code {
    Graph(GraphCode<LinearCode>),
    Folded(FoldedCode),
}

impl CodeBundle {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing code file {}", path.display()))
    }

    pub fn build(&self) -> Result<Code> {
        let g1 = BipartiteGraph::from_file(self.graph.clone())?;
        let c1 = LinearCode::from_file(self.mother.clone())?;
        Ok(match &self.folded {
            None => Code::Graph(GraphCode::new(g1, c1)?),
            Some(f) => {
                let g2 = BipartiteGraph::from_file(f.graph.clone())?;
                let inner = InnerCode::from_file(f.inner.clone())?;
                Code::Folded(FoldedCode::new(g1, c1, g2, inner)?)
            }
        })
    }

    pub fn graph_code(&self) -> Result<GraphCode<LinearCode>> {
        match self.build()? {
            Code::Graph(gc) => Ok(gc),
            Code::Folded(_) => bail!("expected a graph code, found a folded code"),
        }
    }
}
