// Copyright 2026 The ptarm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ptarm_cli::cli::Cli;
use ptarm_cli::run::write_atomically;
use ptarm_cli::{execute, Outcome};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = execute(&cli).and_then(|o| {
        if let Some(path) = &o.out_path {
            write_atomically(path, &o.output)?;
        }
        Ok(o)
    });
    match outcome {
        Ok(Outcome {
            output,
            out_path,
            notes,
            code,
        }) => {
            for n in notes {
                eprintln!("{n}");
            }
            if out_path.is_none() {
                let _ = std::io::stdout().write_all(output.as_bytes());
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
