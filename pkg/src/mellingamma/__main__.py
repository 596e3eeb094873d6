from mellingamma.cli import main

main()
