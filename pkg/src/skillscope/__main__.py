from skillscope.cli import main

main()
