fn main() {
    let stderr = std::io::stderr();
    let code = nrqed::run(std::env::args_os(), &mut std::io::stdout(), &mut stderr.lock());
    std::process::exit(code);
}
