from sentopic.main import cli

cli(prog_name="sentopic")
