use std::io::{self, BufRead, Write};

use super::{handle_request, GraphRegistry};

/// Local shell over the same handler as the wire path. Runs until EOF or
/// `SHUTDOWN`.
pub fn repl<R: BufRead, W: Write>(registry: &GraphRegistry, input: R, mut output: W) -> io::Result<()> {
    for line in input.lines() {
        let line = line?;
        let response = handle_request(&line, registry);
        output.write_all(response.text.as_bytes())?;
        output.flush()?;
        if response.shutdown {
            break;
        }
    }
    Ok(())
}
