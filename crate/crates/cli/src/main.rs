use std::io::IsTerminal;

fn main() {
    let color = std::env::var_os("NIL_NO_COLOR").is_none() && std::io::stdout().is_terminal();
    let code = nil_cli::run_styled(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr(), color);
    std::process::exit(code);
}
