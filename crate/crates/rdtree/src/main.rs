use std::io;

fn main() {
    let env = rdtree::Env {
        no_warn: std::env::var("RDTREE_NO_WARN").is_ok_and(|v| v == "1"),
    };
    let code = rdtree::run(
        std::env::args_os(),
        &env,
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
