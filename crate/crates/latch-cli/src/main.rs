fn main() {
    println!("latch");
}
