use std::collections::BTreeMap;

use pforms::{GroundField, QuasiForm};

use crate::error::{CliError, Result};
use crate::parse::{is_ident, parse_form_with};

/// A field plus named forms, loaded from `name = expr` lines.
#[derive(Clone, Debug)]
pub struct Session {
    pub field: GroundField,
    pub bindings: BTreeMap<String, QuasiForm>,
}

impl Session {
    pub fn new(field: GroundField) -> Session {
        Session { field, bindings: BTreeMap::new() }
    }

    pub fn bind(&mut self, name: &str, form: QuasiForm) -> Result<()> {
        if !is_ident(name) {
            return Err(CliError::Usage(format!("{name:?} is not a valid binding name")));
        }
        if self.field.var_index(name).is_some() {
            return Err(CliError::Usage(format!("binding {name:?} clashes with a field variable")));
        }
        self.bindings.insert(name.to_string(), form);
        Ok(())
    }

    /// Blank lines and lines starting with `#` are skipped. Later lines may
    /// refer to earlier bindings. Parse positions are offsets into `text`.
    pub fn load(&mut self, text: &str) -> Result<()> {
        let mut offset = 0usize;
        for line in text.split_inclusive('\n') {
            let start = offset;
            offset += line.chars().count();
            let body = line.trim_end_matches(['\n', '\r']);
            let trimmed = body.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some(eq) = body.find('=') else {
                return Err(CliError::parse(start, "expected `name = form`"));
            };
            let name = body[..eq].trim();
            let expr = &body[eq + 1..];
            let expr_start = start + body[..eq + 1].chars().count();
            let form = parse_form_with(expr, &self.field, &self.bindings).map_err(|e| match e {
                CliError::Parse { position, message } => CliError::Parse { position: expr_start + position, message },
                other => other,
            })?;
            self.bind(name, form)?;
        }
        Ok(())
    }

    pub fn form(&self, expr: &str) -> Result<QuasiForm> {
        parse_form_with(expr, &self.field, &self.bindings)
    }
}
