use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{Expr, PrimOp};

/// Node-kind and primitive counts of a MET expression. Missing keys read as 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct NodeCensus {
    counts: BTreeMap<String, usize>,
}

impl NodeCensus {
    pub fn get(&self, key: &str) -> usize {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn prim(&self, op: PrimOp) -> usize {
        self.get(op.census_name())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.counts.iter().map(|(k, v)| (k.as_str(), *v))
    }

    fn bump(&mut self, key: &str) {
        *self.counts.entry(key.to_string()).or_default() += 1;
    }
}

impl fmt::Display for NodeCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("}")
    }
}

pub fn count_nodes<I>(e: &Expr<I>) -> NodeCensus {
    let mut census = NodeCensus::default();
    let mut stack = vec![e];
    while let Some(e) = stack.pop() {
        match e {
            Expr::Var(_) => census.bump("Var"),
            Expr::Int(_) => census.bump("IntLit"),
            Expr::Tuple(a, b) => {
                census.bump("Tuple");
                stack.extend([&**a, &**b]);
            }
            Expr::Fst(a) => {
                census.bump("Proj1");
                stack.push(a);
            }
            Expr::Snd(a) => {
                census.bump("Proj2");
                stack.push(a);
            }
            Expr::Construct(_, args) => {
                census.bump("Construct");
                stack.extend(args);
            }
            Expr::Match(s, branches) => {
                census.bump("Match");
                stack.push(s);
                stack.extend(branches.iter().map(|(_, b)| b));
            }
            Expr::Let(_, a, b) => {
                census.bump("Let");
                stack.extend([&**a, &**b]);
            }
            Expr::LetRec { body, cont, .. } => {
                census.bump("LetRecFun");
                stack.extend([&**body, &**cont]);
            }
            Expr::Lambda(_, body) => {
                census.bump("Lambda");
                stack.push(body);
            }
            Expr::App(f, a) => {
                census.bump("App");
                stack.extend([&**f, &**a]);
            }
            Expr::Prim(op, args) => {
                census.bump("Prim");
                census.bump(op.census_name());
                stack.extend(args);
            }
        }
    }
    census
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal() {
        let c = count_nodes(&Expr::Int(5i64));
        assert_eq!(c.get("IntLit"), 1);
        assert_eq!(c.iter().count(), 1);
    }

    #[test]
    fn abstract_add() {
        let c = count_nodes(&Expr::<i64>::prim(PrimOp::AAdd, vec![Expr::var("a"), Expr::var("b")]));
        assert_eq!((c.get("Prim"), c.get("AADD"), c.get("Var")), (1, 1, 2));
        assert_eq!(c.iter().count(), 3);
        assert_eq!(c.get("Match"), 0);
    }
}
