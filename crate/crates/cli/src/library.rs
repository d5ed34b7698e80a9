//! Embedded definition files and name lookup across files.

use crate::ast::DefinitionFile;
use crate::error::{CliError, Result};
use crate::parser::parse;
use crate::resolve::{resolve, Definitions};

/// `(file name, contents)` of the built-in library.
pub const EMBEDDED: [(&str, &str); 4] = [
    ("ex1.def", include_str!("../examples_lib/ex1.def")),
    ("ex2.def", include_str!("../examples_lib/ex2.def")),
    ("ex3.def", include_str!("../examples_lib/ex3.def")),
    ("basics.def", include_str!("../examples_lib/basics.def")),
];

/// A parsed and resolved definition file.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub ast: DefinitionFile,
    pub defs: Definitions,
}

pub fn load(file: &str, src: &str) -> Result<Loaded> {
    let ast = parse(file, src)?;
    let defs = resolve(file, &ast)?;
    Ok(Loaded { ast, defs })
}

/// User files (searched first) followed by the embedded library.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub user: Vec<Loaded>,
    pub library: Vec<Loaded>,
}

impl Workspace {
    pub fn builtin() -> Result<Self> {
        let library = EMBEDDED.iter().map(|(f, s)| load(f, s)).collect::<Result<_>>()?;
        Ok(Workspace {
            user: Vec::new(),
            library,
        })
    }

    pub fn with_user(mut self, file: &str, src: &str) -> Result<Self> {
        self.user.push(load(file, src)?);
        Ok(self)
    }

    /// The one file declaring every name in `names`. User files shadow the
    /// library; within a group a name must not be ambiguous.
    pub fn file_for(&self, names: &[&str]) -> Result<&Definitions> {
        for group in [&self.user, &self.library] {
            let hits: Vec<&Loaded> = group
                .iter()
                .filter(|l| names.iter().all(|n| l.defs.get(n).is_some()))
                .collect();
            match hits.as_slice() {
                [one] => return Ok(&one.defs),
                [] => {}
                many => {
                    return Err(CliError::Usage(format!(
                        "{} are declared in several files: {}",
                        quote(names),
                        many.iter().map(|l| l.defs.file.as_str()).collect::<Vec<_>>().join(", ")
                    )))
                }
            }
        }
        let everywhere: Vec<&Loaded> = self.user.iter().chain(&self.library).collect();
        for n in names {
            if !everywhere.iter().any(|l| l.defs.get(n).is_some()) {
                return Err(CliError::Usage(format!("unknown name `{n}`")));
            }
        }
        Err(CliError::Usage(format!("{} are not declared in one file", quote(names))))
    }

    pub fn loaded(&self, file: &str) -> Option<&Loaded> {
        self.user.iter().chain(&self.library).find(|l| l.defs.file == file)
    }
}

fn quote(names: &[&str]) -> String {
    names.iter().map(|n| format!("`{n}`")).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn library_names_are_unique() {
        let ws = Workspace::builtin().unwrap();
        let mut seen = BTreeSet::new();
        for l in &ws.library {
            for n in l.defs.names() {
                assert!(seen.insert(n.clone()), "`{n}` declared in two library files");
            }
        }
        assert!(ws.file_for(&["ex3", "so3"]).is_ok());
    }

    #[test]
    fn user_file_shadows_library() {
        let ws = Workspace::builtin()
            .unwrap()
            .with_user("mine.def", "chart T = (s, t)\nbivector so3 on T { (s, t): 1 }")
            .unwrap();
        assert_eq!(ws.file_for(&["so3"]).unwrap().file, "mine.def");
        assert!(matches!(ws.file_for(&["nope"]), Err(CliError::Usage(_))));
    }
}
