use crate::exec::{execute, ExecError, ExecutionResult, RootPolicy};
use crate::lang::{parse_params, parse_program, validate, LangError, ParamSet, Program, Registry};
use crate::verify::{self, Verdict};

/// A registry plus execution settings. Cheap to share across threads.
#[derive(Clone, Debug)]
pub struct Engine {
    registry: Registry,
    policy: RootPolicy,
    strict: bool,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::bundled()
    }
}

impl Engine {
    /// Bundled registry, nonnegative-preferred roots, lenient numbering.
    pub fn bundled() -> Engine {
        Engine::new(Registry::bundled())
    }

    pub fn new(registry: Registry) -> Engine {
        Engine { registry, policy: RootPolicy::default(), strict: false }
    }

    pub fn with_policy(mut self, policy: RootPolicy) -> Engine {
        self.policy = policy;
        self
    }

    /// Strict mode turns operand numbering warnings into errors.
    pub fn with_strict(mut self, strict: bool) -> Engine {
        self.strict = strict;
        self
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn policy(&self) -> RootPolicy {
        self.policy
    }

    pub fn strict(&self) -> bool {
        self.strict
    }

    pub fn parse(&self, program: &str, params: &str) -> Result<(Program, ParamSet), LangError> {
        Ok((parse_program(program, &self.registry)?, parse_params(params)?))
    }

    /// Executes a parsed program under this engine's settings.
    pub fn execute(&self, program: &Program, params: &ParamSet) -> Result<ExecutionResult, ExecError> {
        if self.strict {
            let report = validate(program, params, true);
            if let Some(first) = report.errors.first() {
                if first.code == crate::lang::FindingCode::NonSequentialNumbering {
                    return Err(ExecError::InvalidProgram(first.message.clone()));
                }
            }
        }
        execute(program, params, &self.registry, self.policy)
    }

    /// Parses and executes program and parameter text.
    pub fn run(&self, program: &str, params: &str) -> Result<ExecutionResult, ExecError> {
        let (p, ps) = self.parse(program, params)?;
        self.execute(&p, &ps)
    }

    pub fn verify_program(&self, program: &str, params: &str, truth: f64) -> Verdict {
        verify::verify_program(self, program, params, truth)
    }

    pub fn verify_response(&self, response: &str, truth: f64) -> Verdict {
        verify::verify_response(self, response, truth)
    }
}
