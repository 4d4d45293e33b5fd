//! Command implementations. Each returns its full stdout text and exit code,
//! so the binary stays a thin shell and tests can call commands directly.

use std::fmt::Write as _;
use std::path::PathBuf;

use coalg::{
    bag_to_multigraph, defined_inputs, is_tree, reach_levels, reachable_part, rooted_paths, tree_unravelling,
    tree_verdict, unravel, FiniteSet, FunctorExpr, Multigraph, Oracle, PointedCoalgebra, TreeVerdict, Unfolding,
};
use thiserror::Error;

use crate::document::{self, DocError, Document, Truncated};
use crate::dot;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

const DEFAULT_MAXLEN: usize = 8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Guard(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Guard(_) => EXIT_GUARD,
        }
    }
}

impl From<DocError> for CliError {
    fn from(e: DocError) -> Self {
        match e {
            DocError::Model(e) => e.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<coalg::Error> for CliError {
    fn from(e: coalg::Error) -> Self {
        match e {
            coalg::Error::SearchSpaceTooLarge { .. } => CliError::Guard(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Reachable,
    IsTree,
    Unravel,
    DfaInputs,
    Paths,
    Dot,
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub depth: Option<usize>,
    pub maxlen: Option<usize>,
    pub emit: Option<PathBuf>,
    pub dot: Option<PathBuf>,
    pub oracle: bool,
    /// Oracle search-space guard; the library default when `None`.
    pub guard: Option<u128>,
}

impl Options {
    fn oracle(&self) -> Oracle {
        self.guard.map(Oracle::new).unwrap_or_default()
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

pub fn run(cmd: Command, text: &str, opts: &Options) -> Result<Outcome, CliError> {
    let doc = document::parse(text)?;
    let mut out = String::new();
    let code = match cmd {
        Command::Check => check(&doc, &mut out),
        Command::Reachable => reachable(&doc, opts, &mut out)?,
        Command::IsTree => is_tree_cmd(&doc, opts, &mut out)?,
        Command::Unravel => unravel_cmd(&doc, opts, &mut out)?,
        Command::DfaInputs => dfa_inputs(&doc, opts, &mut out)?,
        Command::Paths => paths(&doc, opts, &mut out)?,
        Command::Dot => dot_cmd(&doc, opts, &mut out)?,
    };
    Ok(Outcome { code, stdout: out })
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn count(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

/// Levels as `{a,b}` without spaces, comma-separated.
fn compact(levels: &[FiniteSet]) -> String {
    levels
        .iter()
        .map(|l| format!("{{{}}}", l.iter().map(|x| x.as_str()).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(",")
}

fn check(doc: &Document, out: &mut String) -> i32 {
    match doc {
        Document::Coalgebra(c) => {
            let _ = writeln!(out, "valid coalgebra; {}, point {}", count(c.len(), "state"), c.point());
            let _ = writeln!(out, "functor: {}", c.functor());
        }
        Document::Truncated(t) => {
            let _ = writeln!(
                out,
                "valid truncated coalgebra; {}, {} on the frontier, point {}",
                count(t.states.len(), "state"),
                t.frontier.len(),
                t.point
            );
            let _ = writeln!(out, "functor: {}", t.functor);
        }
        Document::Dfa(d) => {
            let _ = writeln!(
                out,
                "valid dfa; {}, {}, {}",
                count(d.states().len(), "state"),
                count(d.alphabet().len(), "letter"),
                count(d.transitions().count(), "transition")
            );
            let _ = writeln!(out, "functor: {}", d.functor());
        }
        Document::Multigraph(g) => {
            let _ = writeln!(
                out,
                "valid multigraph; {} {}, {}, root {}",
                g.vertices().len(),
                if g.vertices().len() == 1 { "vertex" } else { "vertices" },
                count(g.edges().len(), "edge"),
                g.root()
            );
        }
    }
    EXIT_OK
}

fn reachable(doc: &Document, opts: &Options, out: &mut String) -> Result<i32, CliError> {
    let c = doc.coalgebra()?;
    let levels = reach_levels(&c)?;
    let part = reachable_part(&c)?;
    // the final level repeats earlier states or is empty; show the growth
    let shown: Vec<FiniteSet> = levels.levels.iter().filter(|l| !l.is_empty()).cloned().collect();
    let ok = part.sub.len() == c.len();
    if ok {
        let _ = writeln!(out, "reachable; levels {}", compact(&shown));
    } else {
        let _ = writeln!(out, "not reachable; reachable part = {}", part.sub);
        let _ = writeln!(out, "levels {}", compact(&shown));
        let missing = c.carrier().filter(|x| !part.sub.contains(x));
        let _ = writeln!(out, "unreachable: {missing}");
    }
    let _ = writeln!(out, "{} of {} states reachable from {}", part.sub.len(), c.len(), c.point());
    if opts.oracle {
        let by_def = opts.oracle().reachable_by_definition(&c)?;
        let _ = writeln!(
            out,
            "oracle: every subcoalgebra inclusion is an isomorphism = {by_def} ({})",
            if by_def == ok { "agrees" } else { "DISAGREES" }
        );
    }
    if let Some(path) = &opts.emit {
        write_file(path, &document::emit_coalgebra(&part.coalgebra))?;
        let _ = writeln!(out, "wrote reachable part to {}", path.display());
    }
    Ok(if ok { EXIT_OK } else { EXIT_FALSE })
}

fn is_tree_cmd(doc: &Document, opts: &Options, out: &mut String) -> Result<i32, CliError> {
    let c = doc.coalgebra()?;
    let verdict = tree_verdict(&c)?;
    let ok = verdict == TreeVerdict::Tree;
    match &verdict {
        TreeVerdict::Tree => {
            let _ = writeln!(out, "true");
            let _ = writeln!(out, "isomorphic to the coproduct of its levels ({} states)", c.len());
        }
        TreeVerdict::NotTree(d) => {
            let _ = writeln!(out, "false: {d}");
        }
    }
    if opts.oracle {
        let bound = (c.len() + 2).min(6);
        match opts.oracle().tree_refute_by_definition(&c, bound)? {
            Some(cx) => {
                let _ = writeln!(
                    out,
                    "oracle: {}-state coalgebra with a homomorphism onto the input that has no section",
                    cx.coalgebra.len()
                );
            }
            None => {
                let _ = writeln!(out, "oracle: no refutation with up to {bound} states (not a proof)");
            }
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_FALSE })
}

fn unfolding_document(u: &Unfolding) -> Document {
    match u.tree() {
        Some(t) => Document::Coalgebra(t),
        None => Document::Truncated(Truncated {
            functor: u.functor.clone(),
            states: u.states.clone(),
            point: u.point.clone(),
            frontier: u.frontier.clone(),
            structure: u.structure.clone(),
        }),
    }
}

fn copy_line(u: &Unfolding) -> String {
    u.copy_counts()
        .iter()
        .map(|(x, n)| format!("{x}:{n}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn projection_table(u: &Unfolding, out: &mut String) {
    let width = u.states.iter().map(|x| x.as_str().chars().count()).max().unwrap_or(0);
    for (x, y) in u.projection.iter() {
        let mark = if u.frontier.contains(x) { "  (frontier)" } else { "" };
        let _ = writeln!(out, "  {:<width$} -> {y}{mark}", x.as_str());
    }
}

/// Writes the unfolding to `--emit`/`--dot`, or appends it to stdout.
fn deliver(u: &Unfolding, opts: &Options, out: &mut String) -> Result<(), CliError> {
    let doc = unfolding_document(u);
    let text = document::emit(&doc);
    match &opts.emit {
        Some(path) => {
            write_file(path, &text)?;
            let _ = writeln!(out, "wrote {} to {}", doc.kind(), path.display());
        }
        None => {
            let _ = writeln!(out, "---");
            out.push_str(&text);
        }
    }
    if let Some(path) = &opts.dot {
        write_file(path, &dot::document(&doc))?;
        let _ = writeln!(out, "wrote DOT to {}", path.display());
    }
    Ok(())
}

fn summary(u: &Unfolding, what: &str, cut: &str) -> String {
    if u.complete {
        format!("complete: {} {what}", u.states.len())
    } else {
        format!(
            "truncated {cut}: {} {what}, {} on the frontier",
            u.states.len(),
            u.frontier.len()
        )
    }
}

fn unravel_cmd(doc: &Document, opts: &Options, out: &mut String) -> Result<i32, CliError> {
    let c = doc.coalgebra()?;
    let u = match opts.depth {
        Some(0) => return Err(CliError::Input("--depth must be positive".into())),
        Some(n) => unravel(&c, n)?,
        None => tree_unravelling(&c, None)?,
    };
    let depth = opts.depth.map_or_else(|| "at the default depth".to_string(), |n| format!("at depth {n}"));
    let _ = writeln!(out, "{}", summary(&u, "tree states", &depth));
    let _ = writeln!(out, "copies: {}", copy_line(&u));
    if u.complete && u.projection.is_bijective() {
        let _ = writeln!(out, "input is already a tree");
    }
    if !u.complete {
        let _ = writeln!(out, "frontier: {}", u.frontier);
    }
    let _ = writeln!(out, "projection:");
    projection_table(&u, out);
    deliver(&u, opts, out)?;
    Ok(EXIT_OK)
}

fn dfa_inputs(doc: &Document, opts: &Options, out: &mut String) -> Result<i32, CliError> {
    let Document::Dfa(d) = doc else {
        return Err(CliError::Input(format!("expected a dfa document, found {}", doc.kind())));
    };
    let maxlen = opts.maxlen.unwrap_or(DEFAULT_MAXLEN);
    let u = defined_inputs(d, maxlen)?;
    let _ = writeln!(out, "{}", summary(&u, "words", &format!("at length {maxlen}")));
    let _ = writeln!(out, "P = {}", u.states);
    let _ = writeln!(out, "delta*:");
    projection_table(&u, out);
    deliver(&u, opts, out)?;
    Ok(EXIT_OK)
}

fn graph_of(doc: &Document) -> Result<Multigraph, CliError> {
    match doc {
        Document::Multigraph(g) => Ok(g.clone()),
        Document::Coalgebra(c) if c.functor() == &FunctorExpr::Bag => Ok(bag_to_multigraph(c)?),
        other => Err(CliError::Input(format!(
            "expected a multigraph or Bag coalgebra document, found {}",
            other.kind()
        ))),
    }
}

fn paths(doc: &Document, opts: &Options, out: &mut String) -> Result<i32, CliError> {
    let g = graph_of(doc)?;
    let maxlen = opts.maxlen.unwrap_or(DEFAULT_MAXLEN);
    let u = rooted_paths(&g, maxlen)?;
    let _ = writeln!(out, "{}", summary(&u, "paths", &format!("at length {maxlen}")));
    let _ = writeln!(out, "preimages: {}", copy_line(&u));
    let _ = writeln!(out, "t:");
    projection_table(&u, out);
    deliver(&u, opts, out)?;
    Ok(EXIT_OK)
}

fn dot_cmd(doc: &Document, opts: &Options, out: &mut String) -> Result<i32, CliError> {
    let text = dot::document(doc);
    match &opts.dot {
        Some(path) => {
            write_file(path, &text)?;
            let _ = writeln!(out, "wrote DOT to {}", path.display());
        }
        None => out.push_str(&text),
    }
    Ok(EXIT_OK)
}

/// Used by tests: whether an emitted complete unravelling reads back as a tree.
pub fn reparsed_is_tree(text: &str) -> Result<bool, CliError> {
    let c: PointedCoalgebra = document::parse(text)?.coalgebra()?;
    Ok(is_tree(&c)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use coalg::fixtures;

    fn run_on(cmd: Command, c: &PointedCoalgebra) -> Outcome {
        run(cmd, &document::emit_coalgebra(c), &Options::default()).unwrap()
    }

    fn first_line(o: &Outcome) -> &str {
        o.stdout.lines().next().unwrap()
    }

    #[test]
    fn reachable_summaries() {
        let o = run_on(Command::Reachable, &fixtures::cherry_pair());
        assert_eq!(first_line(&o), "not reachable; reachable part = {left.p, left.q, left.r}");
        assert_eq!(o.code, EXIT_FALSE);
        let o = run_on(Command::Reachable, &fixtures::diamond());
        assert_eq!(first_line(&o), "reachable; levels {r},{p,q},{q,v},{v}");
        assert_eq!(o.code, EXIT_OK);
        assert_eq!(first_line(&run_on(Command::Reachable, &fixtures::singleton_bottom())), "reachable; levels {x}");
    }

    #[test]
    fn tree_summaries() {
        assert_eq!(
            first_line(&run_on(Command::IsTree, &fixtures::shared_leaf())),
            "false: sharing (coproduct of levels has 3 states, carrier has 2)"
        );
        assert_eq!(
            first_line(&run_on(Command::IsTree, &fixtures::sigma_loop())),
            "false: cycle (levels non-empty past bound)"
        );
        let o = run_on(Command::IsTree, &fixtures::cherry());
        assert_eq!((first_line(&o), o.code), ("true", EXIT_OK));
    }

    #[test]
    fn unravel_reports_copies() {
        let opts = Options {
            depth: Some(5),
            ..Options::default()
        };
        let o = run(Command::Unravel, &document::emit_coalgebra(&fixtures::diamond()), &opts).unwrap();
        assert!(o.stdout.starts_with("complete: 9 tree states\ncopies: r:1 p:1 q:3 v:4\n"), "{}", o.stdout);
        let emitted = o.stdout.split("---\n").nth(1).unwrap();
        assert!(reparsed_is_tree(emitted).unwrap());
    }

    #[test]
    fn truncated_unravelling_is_flagged() {
        let opts = Options {
            depth: Some(4),
            ..Options::default()
        };
        let o = run(Command::Unravel, &document::emit_coalgebra(&fixtures::sigma_loop()), &opts).unwrap();
        assert!(first_line(&o).starts_with("truncated at depth 4"), "{}", o.stdout);
        let emitted = o.stdout.split("---\n").nth(1).unwrap();
        assert!(matches!(document::parse(emitted).unwrap(), Document::Truncated(_)));
    }

    #[test]
    fn already_a_tree_is_noted() {
        let o = run_on(Command::Unravel, &fixtures::cherry());
        assert!(o.stdout.contains("\ninput is already a tree\n"));
    }

    #[test]
    fn zero_depth_is_an_input_error() {
        let opts = Options {
            depth: Some(0),
            ..Options::default()
        };
        let err = run(Command::Unravel, &document::emit_coalgebra(&fixtures::cherry()), &opts).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_INPUT);
    }

    #[test]
    fn wrong_kind_for_dfa_inputs() {
        let err = run(Command::DfaInputs, &document::emit_coalgebra(&fixtures::cherry()), &Options::default())
            .unwrap_err();
        assert_eq!(err.exit_code(), EXIT_INPUT);
    }

    #[test]
    fn oracle_guard_maps_to_exit_three() {
        let opts = Options {
            oracle: true,
            guard: Some(1),
            ..Options::default()
        };
        let err = run(Command::Reachable, &document::emit_coalgebra(&fixtures::diamond()), &opts).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_GUARD);
    }
}
