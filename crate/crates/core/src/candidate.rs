use crate::dsl::{self, canonicalize, CanonicalForm, Program, Token};

/// One algorithm as it appears in a run: raw source plus its identity.
///
/// Sources that are not valid DSL ("foreign" code, e.g. from imported runs)
/// get a canonical text equal to the whitespace-normalized source and no
/// parsed program.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub code: String,
    pub canonical: CanonicalForm,
    pub program: Option<Program>,
}

impl Candidate {
    pub fn from_program(program: Program) -> Candidate {
        Candidate {
            code: program.to_source(),
            canonical: canonicalize(&program),
            program: Some(program),
        }
    }

    /// Parses `code` under `input_vars`; on failure the candidate is foreign.
    pub fn from_source(code: &str, input_vars: &[&str]) -> Candidate {
        match dsl::parse(code, input_vars) {
            Ok(program) => Candidate {
                code: code.to_string(),
                canonical: canonicalize(&program),
                program: Some(program),
            },
            Err(_) => Candidate::foreign(code),
        }
    }

    /// Like [`Candidate::from_source`] but accepts any free identifiers as
    /// inputs.
    pub fn from_source_lenient(code: &str) -> Candidate {
        match dsl::parse_lenient(code) {
            Ok(program) => Candidate {
                code: code.to_string(),
                canonical: canonicalize(&program),
                program: Some(program),
            },
            Err(_) => Candidate::foreign(code),
        }
    }

    pub fn foreign(code: &str) -> Candidate {
        let text = normalize_whitespace(code);
        let id = dsl::sha256_hex(&text);
        Candidate {
            code: code.to_string(),
            canonical: CanonicalForm { text, id },
            program: None,
        }
    }

    pub fn id(&self) -> &str {
        &self.canonical.id
    }

    pub fn is_dsl(&self) -> bool {
        self.program.is_some()
    }

    /// The canonical program (let-bindings renamed), if this is DSL code.
    pub fn canonical_program(&self) -> Option<Program> {
        self.program.as_ref().map(Program::alpha_normalized)
    }

    /// Tokens of the canonical text, falling back to word/punctuation
    /// splitting for foreign code.
    pub fn tokens(&self) -> Vec<Token> {
        if self.is_dsl() {
            if let Ok(tokens) = dsl::tokenize(&self.canonical.text) {
                return tokens;
            }
        }
        dsl::tokenize_fallback(&self.canonical.text)
    }
}

pub fn normalize_whitespace(code: &str) -> String {
    code.split_whitespace().collect::<Vec<_>>().join(" ")
}
