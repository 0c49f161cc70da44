fn main() {
    let args: Vec<String> = std::env::args().collect();
    let (code, out, err) = macdonald::cli::main_with(&args);
    if !out.is_empty() {
        println!("{out}");
    }
    if !err.is_empty() {
        eprintln!("{err}");
    }
    std::process::exit(code);
}
