namespace hlx {}
